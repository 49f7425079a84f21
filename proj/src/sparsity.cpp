#include "sparse_poisson/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparse_poisson {

SparsityEstimate estimate_sparsity(const CountVector& x) {
  long long count = 0;
  for (long long v : x.values()) {
    if (v >= 1) ++count;
  }
  const long long s_hat = std::max<long long>(1, count);
  return {s_hat, static_cast<double>(s_hat) / static_cast<double>(x.size()),
          SparsityEstimate::Method::count_nonzero};
}

SparsityEstimate estimate_sparsity_two_cluster(const CountVector& x) {
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("estimate_sparsity_two_cluster: need n >= 2");
  }
  std::vector<double> v(x.values().begin(), x.values().end());
  std::sort(v.begin(), v.end());
  if (v.front() == v.back()) {
    // single cluster; fall back to the nonzero count
    SparsityEstimate est = estimate_sparsity(x);
    est.method = SparsityEstimate::Method::two_cluster;
    return est;
  }

  // prefix sums make each split's within-cluster SSE O(1)
  std::vector<double> ps(n + 1, 0.0), ps2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    ps[i + 1] = ps[i] + v[i];
    ps2[i + 1] = ps2[i] + v[i] * v[i];
  }
  auto sse = [&](std::size_t a, std::size_t b) {  // [a, b)
    const double cnt = static_cast<double>(b - a);
    const double sum = ps[b] - ps[a];
    return (ps2[b] - ps2[a]) - sum * sum / cnt;
  };
  std::size_t best_k = 1;
  double best = sse(0, 1) + sse(1, n);
  for (std::size_t k = 2; k < n; ++k) {
    const double cur = sse(0, k) + sse(k, n);
    if (cur < best) {
      best = cur;
      best_k = k;
    }
  }
  const long long s_hat =
      std::max<long long>(1, static_cast<long long>(n - best_k));
  return {s_hat, static_cast<double>(s_hat) / static_cast<double>(n),
          SparsityEstimate::Method::two_cluster};
}

SparsityEstimate estimate_sparsity_per_period(
    const std::vector<CountVector>& periods) {
  if (periods.empty()) {
    throw std::invalid_argument("estimate_sparsity_per_period: no periods");
  }
  const std::size_t n = periods.front().size();
  double total = 0.0;
  for (const CountVector& p : periods) {
    if (p.size() != n) {
      throw std::invalid_argument(
          "estimate_sparsity_per_period: period length mismatch");
    }
    long long count = 0;
    for (long long v : p.values()) {
      if (v > 1) ++count;
    }
    total += static_cast<double>(count);
  }
  const double mean = total / static_cast<double>(periods.size());
  const long long s_hat =
      std::max<long long>(1, static_cast<long long>(std::floor(mean + 0.5)));
  return {s_hat, static_cast<double>(s_hat) / static_cast<double>(n),
          SparsityEstimate::Method::per_period_mean};
}

}  // namespace sparse_poisson
