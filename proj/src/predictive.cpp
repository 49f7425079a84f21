#include "sparse_poisson/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparse_poisson/parallel.hpp"
#include "sparse_poisson/quadrature.hpp"

namespace sparse_poisson {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log1p_exp(double a) {
  // log(1 + e^a), stable for both signs
  if (a > 0.0) return a + std::log1p(std::exp(-a));
  return std::log1p(std::exp(a));
}

// Truncation point with tail mass far below 1e-9 for the normalization
// contract: ceil(mean + 20 sqrt(mean+1) + 60).
long long pmf_support_bound(double mean) {
  return static_cast<long long>(
      std::ceil(mean + 20.0 * std::sqrt(mean + 1.0) + 60.0));
}

}  // namespace

PredictiveDensity::PredictiveDensity(std::vector<long long> x,
                                     SamplingRatios ratios, double h,
                                     double kappa, std::vector<double> omega)
    : x_(std::move(x)),
      ratios_(std::move(ratios)),
      h_(h),
      kappa_(kappa),
      omega_(std::move(omega)) {}

PredictiveDensity PredictiveDensity::fit(const CountVector& x,
                                         const SpikeSlabPrior& prior,
                                         const SamplingRatios& ratios) {
  const PowerSlab& slab = prior.power_slab();
  ratios.check_length(x.size());
  const double log_h = std::log(prior.scale_h);
  const double lg_kappa = std::lgamma(slab.kappa);
  std::vector<double> omega(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) continue;
    // omega = 1 / (1 + h Gamma(kappa) / r^kappa), in log space
    const double log_g = log_h + lg_kappa - slab.kappa * std::log(ratios.at(i));
    omega[i] = std::exp(-log1p_exp(log_g));
  }
  return PredictiveDensity(x.values(), ratios, prior.scale_h, slab.kappa,
                           std::move(omega));
}

PredictiveDensity PredictiveDensity::fit_no_spike(const CountVector& x,
                                                  double kappa,
                                                  const SamplingRatios& ratios) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("fit_no_spike: kappa must be > 0");
  }
  ratios.check_length(x.size());
  return PredictiveDensity(x.values(), ratios,
                           std::numeric_limits<double>::infinity(), kappa,
                           std::vector<double>(x.size(), 0.0));
}

double PredictiveDensity::coord_mean(std::size_t i) const {
  return (1.0 - omega_[i]) * nb_size(i) / ratios_.at(i);
}

double PredictiveDensity::coord_log_pmf(std::size_t i, long long y) const {
  if (y < 0) return kNegInf;
  const double m = nb_size(i);
  const double r = ratios_.at(i);
  const double yd = static_cast<double>(y);
  const double log_nb = std::lgamma(m + yd) - std::lgamma(yd + 1.0) -
                        std::lgamma(m) +
                        m * (std::log(r) - std::log(r + 1.0)) -
                        yd * std::log(r + 1.0);
  const double om = omega_[i];
  if (om <= 0.0) return log_nb;
  if (y == 0) {
    // omega + (1-omega) e^lognb
    return std::log(om) + log1p_exp(std::log1p(-om) - std::log(om) + log_nb);
  }
  return std::log1p(-om) + log_nb;
}

double PredictiveDensity::coord_pmf(std::size_t i, long long y) const {
  return std::exp(coord_log_pmf(i, y));
}

double PredictiveDensity::joint_log_pmf(const CountVector& y) const {
  if (y.size() != size()) {
    throw std::invalid_argument("joint_log_pmf: length mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double lp = coord_log_pmf(i, y[i]);
    if (lp == kNegInf) return kNegInf;
    total += lp;
  }
  return total;
}

long long PredictiveDensity::coord_quantile(std::size_t i, double p) const {
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("coord_quantile: p must be in [0,1)");
  }
  const long long cap = pmf_support_bound(coord_mean(i));
  double cdf = 0.0;
  for (long long y = 0; y <= cap; ++y) {
    cdf += coord_pmf(i, y);
    if (cdf >= p) return y;
  }
  return cap;
}

long long PredictiveDensity::coord_quantile_midp(std::size_t i,
                                                 double p) const {
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("coord_quantile_midp: p must be in [0,1)");
  }
  const long long cap = pmf_support_bound(coord_mean(i));
  double cdf_prev = 0.0;
  for (long long y = 0; y <= cap; ++y) {
    const double pmf = coord_pmf(i, y);
    if (cdf_prev + 0.5 * pmf >= p) return y;
    cdf_prev += pmf;
  }
  return cap;
}

double PredictiveDensity::coord_interval_mass(std::size_t i, long long lo,
                                              long long hi) const {
  double mass = 0.0;
  for (long long y = std::max<long long>(lo, 0); y <= hi; ++y) {
    mass += coord_pmf(i, y);
  }
  return mass;
}

long long PredictiveDensity::coord_sample(std::size_t i,
                                          CounterRng& rng) const {
  const double om = omega_[i];
  if (om > 0.0 && rng.next_double() < om) return 0;
  // negative binomial through its Gamma-Poisson mixture, which also covers
  // non-integer sizes
  const double g = rgamma(rng, nb_size(i), ratios_.at(i));
  return rpois(rng, g);
}

std::vector<CountVector> PredictiveDensity::sample(long long m,
                                                   std::uint64_t seed) const {
  if (m < 1) throw std::invalid_argument("sample: m must be >= 1");
  std::vector<CountVector> out;
  out.reserve(static_cast<std::size_t>(m));
  for (long long j = 0; j < m; ++j) {
    std::vector<long long> draw(size());
    for (std::size_t i = 0; i < size(); ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(j), i);
      draw[i] = coord_sample(i, rng);
    }
    out.push_back(CountVector(std::move(draw)));
  }
  return out;
}

double posterior_mean_coord(long long x, double h, double kappa, double t) {
  if (x >= 1) return (static_cast<double>(x) + kappa) / t;
  const double log_t = std::log(t);
  const double num = std::log(h) + std::lgamma(kappa + 1.0) -
                     (kappa + 1.0) * log_t;
  const double log_g = std::log(h) + std::lgamma(kappa) - kappa * log_t;
  return std::exp(num - log1p_exp(log_g));
}

std::vector<double> posterior_mean(const CountVector& x,
                                   const SpikeSlabPrior& prior,
                                   const SamplingRatios& ratios,
                                   std::optional<double> t_override) {
  const PowerSlab& slab = prior.power_slab();
  ratios.check_length(x.size());
  if (t_override && !(*t_override > 0.0)) {
    throw std::invalid_argument("posterior_mean: t_override must be > 0");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = t_override ? *t_override : ratios.at(i);
    out[i] = posterior_mean_coord(x[i], prior.scale_h, slab.kappa, t);
  }
  return out;
}

SlabIntegralTable::SlabIntegralTable(std::function<double(double)> log_gamma,
                                     double rel_tol)
    : log_gamma_(std::move(log_gamma)), rel_tol_(rel_tol) {}

double SlabIntegralTable::log_integral(double s, double t) const {
  const auto key = std::make_pair(s, t);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double v = log_slab_integral(log_gamma_, s, t, rel_tol_);
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(key, v);
  return v;
}

double SlabIntegralTable::integral(double s, double t) const {
  return std::exp(log_integral(s, t));
}

double slab_integral(const GeneralSlab& slab, double s, double t,
                     double rel_tol) {
  auto lg = [&slab](double lambda) { return slab.log_density(lambda); };
  return std::exp(log_slab_integral(lg, s, t, rel_tol));
}

double posterior_mean_general_coord(long long x, const SlabIntegralTable& tab,
                                    double eta, double t) {
  const double xd = static_cast<double>(x);
  const double log_num = std::log(eta) + tab.log_integral(xd + 2.0, t);
  double log_den = std::log(eta) + tab.log_integral(xd + 1.0, t);
  if (x == 0) {
    // spike contributes (1 - eta) 0^x = 1 - eta only at x = 0
    const double a = std::log1p(-eta);
    const double hi = std::max(a, log_den);
    log_den = hi + std::log(std::exp(a - hi) + std::exp(log_den - hi));
  }
  return std::exp(log_num - log_den);
}

std::vector<double> posterior_mean_general(const CountVector& x,
                                           const GeneralSlab& slab,
                                           const SamplingRatios& ratios) {
  ratios.check_length(x.size());
  SlabIntegralTable tab([&slab](double l) { return slab.log_density(l); });
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = posterior_mean_general_coord(x[i], tab, slab.mixing_weight(),
                                          ratios.at(i));
  }
  return out;
}

TailRobustnessReport tail_robustness_diagnostic(
    const std::function<double(long long)>& mean_fn, double r,
    std::vector<long long> x_grid) {
  if (x_grid.empty()) {
    throw std::invalid_argument("tail_robustness_diagnostic: empty grid");
  }
  std::sort(x_grid.begin(), x_grid.end());
  if (x_grid.front() < 1) {
    throw std::invalid_argument(
        "tail_robustness_diagnostic: grid values must be >= 1");
  }
  const long long x_max = x_grid.back();
  if (x_max < 100) {
    throw std::invalid_argument(
        "tail_robustness_diagnostic: grid must reach X_max >= 100");
  }
  TailRobustnessReport rep;
  rep.x_grid = x_grid;
  rep.ratios.reserve(x_grid.size());
  for (long long x : x_grid) {
    const double ref = static_cast<double>(x) / r;
    rep.ratios.push_back(std::fabs(mean_fn(x) - ref) / ref);
  }
  bool decreasing = true;
  double prev = -1.0;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (x_grid[i] * 10 < x_max) continue;  // only the top decade
    if (prev >= 0.0 && rep.ratios[i] > prev + 1e-12) decreasing = false;
    prev = rep.ratios[i];
  }
  rep.robust = decreasing && rep.ratios.back() < 0.01;
  return rep;
}

}  // namespace sparse_poisson
