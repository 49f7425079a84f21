#ifndef SPARSE_POISSON_HARNESS_HPP
#define SPARSE_POISSON_HARNESS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sparse_poisson/model.hpp"
#include "sparse_poisson/parallel.hpp"
#include "sparse_poisson/prediction_sets.hpp"
#include "sparse_poisson/predictive.hpp"

namespace sparse_poisson {

// Simulation scenario: s Gamma(spike_shape, spike_scale) spikes on a
// uniformly random s-subset; quasi adds Uniform[0, xi_max] off-support
// rates; MCAR draws r_i = 1 + Binomial(mcar_m, mcar_p) per coordinate.
struct ScenarioSpec {
  long long n = 200;
  long long s = 5;
  bool quasi = false;
  double xi_max = 1e-2;
  double spike_shape = 10.0;
  double spike_scale = 1.0;
  bool mcar = false;
  double r = 1.0;
  long long mcar_m = 1;
  double mcar_p = 0.9;
  long long trials = 500;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TrialData {
  std::vector<double> theta;
  CountVector x;
  CountVector y;
  SamplingRatios ratios;
};

// Deterministic per (spec.seed, trial_index).
TrialData generate_trial(const ScenarioSpec& spec, long long trial_index);

enum class ScaleRule { auto_lstar, auto_lbar, fixed };
enum class SparsityMethod { count, count_gt1, kmeans2, fixed };

struct ProposedConfig {
  double kappa = 0.1;
  ScaleRule scale = ScaleRule::auto_lstar;
  double fixed_h = 0.0;
  SparsityMethod sparsity = SparsityMethod::count;
  long long fixed_s = 1;
};

// h = L eta_hat with L from the scale rule, then the closed-form fit.
PredictiveDensity method_proposed(const CountVector& x,
                                  const SamplingRatios& ratios,
                                  const ProposedConfig& cfg);
long long estimate_s_hat(const CountVector& x, SparsityMethod method,
                         long long fixed_s);

// Degenerate plug-in predictive: independent Poissons at the l1-penalized
// maximizer theta_i = x_i / (r_i (1 + lambda_reg)); point mass at zero
// where x_i = 0.
class PluginPoissonDensity {
 public:
  PluginPoissonDensity(const CountVector& x, const SamplingRatios& ratios,
                       double lambda_reg);

  std::size_t size() const { return x_.size(); }
  long long x(std::size_t i) const { return x_[i]; }
  double theta_hat(std::size_t i) const { return theta_hat_[i]; }
  double coord_mean(std::size_t i) const { return theta_hat_[i]; }
  double coord_log_pmf(std::size_t i, long long y) const;
  double joint_log_pmf(const CountVector& y) const;
  long long coord_quantile(std::size_t i, double p) const;
  long long coord_quantile_midp(std::size_t i, double p) const;
  double coord_interval_mass(std::size_t i, long long lo, long long hi) const;
  long long coord_sample(std::size_t i, CounterRng& rng) const;

 private:
  std::vector<long long> x_;
  std::vector<double> theta_hat_;
};

PluginPoissonDensity method_l1_plugin(const CountVector& x,
                                      const SamplingRatios& ratios,
                                      double lambda_reg);

// Non-sparse negative-binomial control (omega forced to zero).
PredictiveDensity method_gamma_baseline(const CountVector& x,
                                        const SamplingRatios& ratios,
                                        double kappa);

struct TrialMetrics {
  double l1;
  double weighted_l1;
  double pll;  // -inf when a coordinate has zero predictive mass at y
  bool covered;
};

// l1 and weighted l1 between the predictive mean and y, the predictive log
// likelihood at y, and membership of y in the support-adjusted joint set.
template <class Density>
TrialMetrics compute_metrics(const Density& density, const CountVector& y,
                             const SamplingRatios& ratios, double alpha) {
  if (y.size() != density.size()) {
    throw std::invalid_argument("compute_metrics: length mismatch");
  }
  TrialMetrics m{};
  double wsum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double diff =
        std::fabs(density.coord_mean(i) - static_cast<double>(y[i]));
    m.l1 += diff;
    m.weighted_l1 += ratios.at(i) * diff;
    wsum += ratios.at(i);
  }
  m.weighted_l1 /= wsum / static_cast<double>(y.size());
  m.pll = density.joint_log_pmf(y);
  m.covered = contains(support_adjusted_set(density, alpha), y);
  return m;
}

struct MethodSpec {
  enum class Kind { proposed, l1_plugin, gamma_baseline, external };
  Kind kind = Kind::proposed;
  std::string name;
  ProposedConfig proposed;
  double lambda_reg = 0.1;
  double baseline_kappa = 1.0;
  std::string csv_path;  // external per-trial metrics
};

struct MethodSummary {
  std::string name;
  long long trials = 0;
  double l1_mean = 0.0, l1_sd = 0.0;
  double wl1_mean = 0.0, wl1_sd = 0.0;
  // pll_mean is -inf when any trial diverged, matching the tables' "-Inf"
  double pll_mean = 0.0, pll_sd = 0.0;
  long long pll_inf_trials = 0;
  double coverage_pct = 0.0, coverage_sd_pct = 0.0;
};

struct TableResult {
  std::vector<MethodSummary> summaries;
  // per-method, per-trial metrics in trial order
  std::vector<std::vector<TrialMetrics>> per_trial;
};

TableResult run_table(const ScenarioSpec& spec,
                      const std::vector<MethodSpec>& methods, double alpha,
                      ExecMode mode = ExecMode::openmp);

MethodSummary summarize(const std::string& name,
                        const std::vector<TrialMetrics>& metrics);

// Per-trial metrics from an externally computed CSV with columns
// l1, weighted_l1, pll, covered.
std::vector<TrialMetrics> load_external_metrics(const std::string& path);

}  // namespace sparse_poisson

#endif
