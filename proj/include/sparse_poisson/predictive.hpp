#ifndef SPARSE_POISSON_PREDICTIVE_HPP
#define SPARSE_POISSON_PREDICTIVE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "sparse_poisson/model.hpp"
#include "sparse_poisson/rng.hpp"

namespace sparse_poisson {

// Fitted Bayes predictive density for the power slab: per coordinate a
// zero-inflated negative binomial with spike weight omega_i, size x_i +
// kappa and success ratio r_i/(r_i+1).
class PredictiveDensity {
 public:
  static PredictiveDensity fit(const CountVector& x,
                               const SpikeSlabPrior& prior,
                               const SamplingRatios& ratios);
  // Plain negative-binomial predictive (omega forced to zero); the
  // non-sparse control used by the simulation harness.
  static PredictiveDensity fit_no_spike(const CountVector& x, double kappa,
                                        const SamplingRatios& ratios);

  std::size_t size() const { return x_.size(); }
  long long x(std::size_t i) const { return x_[i]; }
  double ratio(std::size_t i) const { return ratios_.at(i); }
  double kappa() const { return kappa_; }
  double h() const { return h_; }

  double omega(std::size_t i) const { return omega_[i]; }
  double nb_size(std::size_t i) const {
    return static_cast<double>(x_[i]) + kappa_;
  }
  double nb_success(std::size_t i) const {
    const double r = ratios_.at(i);
    return r / (r + 1.0);
  }
  // (1 - omega_i) (x_i + kappa) / r_i
  double coord_mean(std::size_t i) const;

  double coord_log_pmf(std::size_t i, long long y) const;
  double coord_pmf(std::size_t i, long long y) const;
  // sum of coordinate log pmfs; -inf (never NaN) when a coordinate
  // underflows to zero mass
  double joint_log_pmf(const CountVector& y) const;

  // smallest y with CDF(y) >= p, p in [0,1)
  long long coord_quantile(std::size_t i, double p) const;
  // smallest y with CDF(y-1) + pmf(y)/2 >= p (mid-p convention)
  long long coord_quantile_midp(std::size_t i, double p) const;
  // predictive mass of {lo,...,hi}
  double coord_interval_mass(std::size_t i, long long lo, long long hi) const;

  long long coord_sample(std::size_t i, CounterRng& rng) const;
  // m joint draws; draw j, coordinate i uses stream (seed, j, i) so any
  // parallel schedule reproduces the same sample
  std::vector<CountVector> sample(long long m, std::uint64_t seed) const;

 private:
  PredictiveDensity(std::vector<long long> x, SamplingRatios ratios, double h,
                    double kappa, std::vector<double> omega);
  std::vector<long long> x_;
  SamplingRatios ratios_;
  double h_;
  double kappa_;
  std::vector<double> omega_;
};

// Closed-form posterior mean of theta_i under the power slab at intensity
// t (defaults to r_i). Strictly positive for h > 0.
std::vector<double> posterior_mean(const CountVector& x,
                                   const SpikeSlabPrior& prior,
                                   const SamplingRatios& ratios,
                                   std::optional<double> t_override = {});
double posterior_mean_coord(long long x, double h, double kappa, double t);

// Memoized slab integrals I_gamma(s;t) for one slab density.
class SlabIntegralTable {
 public:
  explicit SlabIntegralTable(std::function<double(double)> log_gamma,
                             double rel_tol = 1e-10);
  double log_integral(double s, double t) const;
  double integral(double s, double t) const;

 private:
  std::function<double(double)> log_gamma_;
  double rel_tol_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, double> cache_;
};

double slab_integral(const GeneralSlab& slab, double s, double t,
                     double rel_tol = 1e-10);

// Posterior mean ratio eta I(x+2;t) / ((1-eta) 0^x + eta I(x+1;t)).
std::vector<double> posterior_mean_general(const CountVector& x,
                                           const GeneralSlab& slab,
                                           const SamplingRatios& ratios);
double posterior_mean_general_coord(long long x, const SlabIntegralTable& tab,
                                    double eta, double t);

struct TailRobustnessReport {
  std::vector<long long> x_grid;
  std::vector<double> ratios;  // |theta_hat(x) - x/r| / (x/r)
  bool robust;
};

// Checks the relative deviation of a posterior-mean evaluator from x/r on
// the grid; robust iff the ratio at the largest x is below 0.01 and the
// ratios are non-increasing over the top decade.
TailRobustnessReport tail_robustness_diagnostic(
    const std::function<double(long long)>& mean_fn, double r,
    std::vector<long long> x_grid);

}  // namespace sparse_poisson

#endif
