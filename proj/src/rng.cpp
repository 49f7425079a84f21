#include "sparse_poisson/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sparse_poisson {

double rnorm(CounterRng& rng) {
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Marsaglia-Tsang; shapes below 1 are boosted through G(a) = G(a+1) U^{1/a}.
double rgamma(CounterRng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("rgamma: shape and rate must be positive");
  }
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(rng.next_double(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rnorm(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return boost * d * v / rate;
    }
  }
}

namespace {

long long rpois_knuth(CounterRng& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = 1.0;
  long long k = 0;
  for (;;) {
    prod *= rng.next_double();
    if (prod <= limit) return k;
    ++k;
  }
}

// Hormann's PTRS transformed rejection, valid for mean >= 10.
long long rpois_ptrs(CounterRng& rng, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<long long>(kf);
    }
  }
}

}  // namespace

long long rpois(CounterRng& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("rpois: mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return rpois_knuth(rng, mean);
  return rpois_ptrs(rng, mean);
}

long long rbinom(CounterRng& rng, long long trials, double p) {
  if (trials < 0 || !(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("rbinom: invalid parameters");
  }
  long long k = 0;
  for (long long i = 0; i < trials; ++i) {
    if (rng.next_double() < p) ++k;
  }
  return k;
}

}  // namespace sparse_poisson
