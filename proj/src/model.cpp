#include "sparse_poisson/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sparse_poisson/parallel.hpp"
#include "sparse_poisson/quadrature.hpp"
#include "sparse_poisson/rng.hpp"

namespace sparse_poisson {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

CountVector::CountVector(std::vector<long long> values)
    : values_(std::move(values)) {
  require(!values_.empty(), "CountVector: length must be >= 1");
  for (long long v : values_) {
    require(v >= 0, "CountVector: entries must be non-negative");
  }
}

SamplingRatios::SamplingRatios(bool scalar, std::vector<double> values)
    : scalar_(scalar), values_(std::move(values)) {}

SamplingRatios SamplingRatios::scalar(double r) {
  require(finite_positive(r), "SamplingRatios: r must be finite and > 0");
  return SamplingRatios(true, {r});
}

SamplingRatios SamplingRatios::per_coordinate(std::vector<double> r) {
  require(!r.empty(), "SamplingRatios: empty ratio vector");
  for (double v : r) {
    require(finite_positive(v), "SamplingRatios: ratios must be finite, > 0");
  }
  return SamplingRatios(false, std::move(r));
}

void SamplingRatios::check_length(std::size_t n) const {
  if (!scalar_ && values_.size() != n) {
    throw std::invalid_argument("SamplingRatios: length " +
                                std::to_string(values_.size()) +
                                " does not match n = " + std::to_string(n));
  }
}

GeneralSlab::GeneralSlab(std::function<double(double)> log_density,
                         double drift_bound, double mixing_weight)
    : log_density_(std::move(log_density)),
      drift_bound_(drift_bound),
      mixing_weight_(mixing_weight) {
  require(static_cast<bool>(log_density_), "GeneralSlab: missing density");
  require(finite_positive(drift_bound_), "GeneralSlab: Lambda must be > 0");
  require(mixing_weight_ > 0.0 && mixing_weight_ < 1.0,
          "GeneralSlab: mixing weight must be in (0,1)");

  // Drift condition spot-checked on a 200-point log grid over [1e-6, 1e6];
  // the exact condition is a supremum over all of (0, inf).
  const int grid = 200;
  const double lo = std::log(1e-6), hi = std::log(1e6);
  const double step = 1e-4;
  for (int i = 0; i < grid; ++i) {
    const double w = lo + (hi - lo) * i / (grid - 1);
    const double drift = (log_density_(std::exp(w + step)) -
                          log_density_(std::exp(w - step))) /
                         (2.0 * step);
    if (!std::isfinite(drift) || std::fabs(drift) > drift_bound_ + 1e-6) {
      throw std::invalid_argument(
          "GeneralSlab: drift condition violated at lambda = " +
          std::to_string(std::exp(w)));
    }
  }
  // Integrability of exp(-lambda) gamma(lambda); throws if the quadrature
  // does not converge.
  (void)log_slab_integral(log_density_, 1.0, 1.0, 1e-8);
}

SpikeSlabPrior SpikeSlabPrior::power(double h, double kappa) {
  require(finite_positive(h), "SpikeSlabPrior: h must be finite and > 0");
  require(finite_positive(kappa), "SpikeSlabPrior: kappa must be > 0");
  return SpikeSlabPrior{h, PowerSlab{kappa}};
}

SpikeSlabPrior SpikeSlabPrior::general(GeneralSlab slab) {
  return SpikeSlabPrior{1.0, std::move(slab)};
}

const PowerSlab& SpikeSlabPrior::power_slab() const {
  if (!is_power()) {
    throw std::invalid_argument("SpikeSlabPrior: power slab required");
  }
  return std::get<PowerSlab>(slab);
}

const GeneralSlab& SpikeSlabPrior::general_slab() const {
  if (is_power()) {
    throw std::invalid_argument("SpikeSlabPrior: general slab required");
  }
  return std::get<GeneralSlab>(slab);
}

SparsitySpace SparsitySpace::exact(double s, std::size_t n) {
  require(finite_positive(s) && s < static_cast<double>(n),
          "SparsitySpace: need 0 < s < n");
  return SparsitySpace{Kind::exact, s, 0.0};
}

SparsitySpace SparsitySpace::quasi(double s, double epsilon, std::size_t n) {
  require(finite_positive(s) && s < static_cast<double>(n),
          "SparsitySpace: need 0 < s < n");
  require(finite_positive(epsilon), "SparsitySpace: epsilon must be > 0");
  return SparsitySpace{Kind::quasi, s, epsilon};
}

double constant_c(double r) {
  require(finite_positive(r), "constant_c: r must be finite and > 0");
  // (r/(r+1))^r evaluated in log space to avoid underflow for large r
  return std::exp(r * (std::log(r) - std::log(r + 1.0))) / (r + 1.0);
}

double constant_k(double r, double kappa) {
  require(finite_positive(r), "constant_k: r must be finite and > 0");
  require(finite_positive(kappa), "constant_k: kappa must be finite and > 0");
  const double lr = std::log(r);
  const double lr1 = std::log(r + 1.0);
  if (kappa < 1e-8) {
    // (r^-k - (r+1)^-k)/k -> log((r+1)/r), with the first-order correction
    const double first = (lr1 * lr1 - lr * lr) / 2.0;
    return std::tgamma(kappa + 1.0) * ((lr1 - lr) + kappa * first);
  }
  const double diff = std::exp(-kappa * lr) - std::exp(-kappa * lr1);
  return std::tgamma(kappa + 1.0) * diff / kappa;
}

double optimal_scale(double r, double kappa) {
  return constant_c(r) / constant_k(r, kappa);
}

ConstantsReport scalar_constants(double r, double kappa) {
  ConstantsReport rep;
  rep.c = constant_c(r);
  rep.k = constant_k(r, kappa);
  rep.l_star = rep.c / rep.k;
  rep.c_bar = rep.c;
  rep.k_bar = rep.k;
  rep.l_bar = rep.l_star;
  return rep;
}

ConstantsReport mcar_constants(const SamplingRatios& ratios, double kappa) {
  require(ratios.size() >= 1, "mcar_constants: empty ratio vector");
  require(finite_positive(kappa), "mcar_constants: kappa must be > 0");
  const std::size_t n = ratios.size();
  double c_sum = 0.0, k_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ratios.at(i);
    c_sum += constant_c(r);
    k_sum += std::exp(-kappa * std::log(r)) -
             std::exp(-kappa * std::log(r + 1.0));
  }
  ConstantsReport rep;
  rep.c_bar = c_sum / static_cast<double>(n);
  rep.k_bar = std::tgamma(kappa + 1.0) * k_sum /
              (static_cast<double>(n) * kappa);
  rep.l_bar = rep.c_bar / rep.k_bar;
  const double r0 = ratios.at(0);
  rep.c = constant_c(r0);
  rep.k = constant_k(r0, kappa);
  rep.l_star = rep.c / rep.k;
  return rep;
}

McEstimate expected_constant_under_g(const RatioLaw& law, long long n_mc,
                                     std::uint64_t seed) {
  require(n_mc >= 1, "expected_constant_under_g: n_mc must be >= 1");
  if (const auto* g = std::get_if<GammaRatioLaw>(&law)) {
    require(finite_positive(g->r) && finite_positive(g->l),
            "expected_constant_under_g: invalid Gamma parameters");
  } else {
    const auto& b = std::get<ShiftedBinomialRatioLaw>(law);
    require(b.n_trials >= 0 && b.p >= 0.0 && b.p <= 1.0,
            "expected_constant_under_g: invalid binomial parameters");
  }

  double sum = 0.0, sum_sq = 0.0;
  // Each draw owns its own counter stream, so the estimate does not depend
  // on how the loop is scheduled.
  for (long long i = 0; i < n_mc; ++i) {
    CounterRng rng(seed, 0x67u, static_cast<std::uint64_t>(i));
    double r;
    if (const auto* g = std::get_if<GammaRatioLaw>(&law)) {
      r = rgamma(rng, g->r / g->l, 1.0 / g->l);
    } else {
      const auto& b = std::get<ShiftedBinomialRatioLaw>(law);
      r = 1.0 + static_cast<double>(rbinom(rng, b.n_trials, b.p));
    }
    const double c = constant_c(r);
    sum += c;
    sum_sq += c * c;
  }
  const double mean = sum / static_cast<double>(n_mc);
  double var = sum_sq / static_cast<double>(n_mc) - mean * mean;
  if (var < 0.0) var = 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_mc))};
}

}  // namespace sparse_poisson
