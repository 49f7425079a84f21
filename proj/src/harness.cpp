#include "sparse_poisson/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sparse_poisson/csv.hpp"
#include "sparse_poisson/rng.hpp"
#include "sparse_poisson/sparsity.hpp"

namespace sparse_poisson {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// stream tags for the independent draws of one trial
enum : std::uint64_t {
  kStreamSubset = 1,
  kStreamSpikes = 2,
  kStreamXi = 3,
  kStreamRatios = 4,
  kStreamX = 5,
  kStreamY = 6,
};

}  // namespace

void ScenarioSpec::validate() const {
  if (n < 2 || s < 1 || s >= n) {
    throw std::invalid_argument("ScenarioSpec: need 1 <= s < n");
  }
  if (trials < 1) throw std::invalid_argument("ScenarioSpec: trials >= 1");
  if (!(spike_shape > 0.0) || !(spike_scale > 0.0)) {
    throw std::invalid_argument("ScenarioSpec: invalid spike law");
  }
  if (quasi && !(xi_max > 0.0)) {
    throw std::invalid_argument("ScenarioSpec: xi_max must be > 0");
  }
  if (mcar) {
    if (mcar_m < 0 || !(mcar_p >= 0.0) || !(mcar_p <= 1.0)) {
      throw std::invalid_argument("ScenarioSpec: invalid MCAR parameters");
    }
  } else if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("ScenarioSpec: r must be finite and > 0");
  }
}

TrialData generate_trial(const ScenarioSpec& spec, long long trial_index) {
  spec.validate();
  const std::size_t n = static_cast<std::size_t>(spec.n);
  const std::uint64_t trial = static_cast<std::uint64_t>(trial_index);

  // uniform s-subset by partial Fisher-Yates
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  CounterRng subset_rng(spec.seed, trial, 0, kStreamSubset);
  for (long long k = 0; k < spec.s; ++k) {
    const std::uint64_t j =
        subset_rng.next_u64() % static_cast<std::uint64_t>(n - k);
    std::swap(idx[static_cast<std::size_t>(k)],
              idx[static_cast<std::size_t>(k) + static_cast<std::size_t>(j)]);
  }

  std::vector<double> theta(n, 0.0);
  CounterRng spike_rng(spec.seed, trial, 0, kStreamSpikes);
  for (long long k = 0; k < spec.s; ++k) {
    theta[idx[static_cast<std::size_t>(k)]] =
        rgamma(spike_rng, spec.spike_shape, 1.0 / spec.spike_scale);
  }
  if (spec.quasi) {
    CounterRng xi_rng(spec.seed, trial, 0, kStreamXi);
    std::vector<bool> on_support(n, false);
    for (long long k = 0; k < spec.s; ++k) {
      on_support[idx[static_cast<std::size_t>(k)]] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!on_support[i]) theta[i] = spec.xi_max * xi_rng.next_double();
    }
  }

  SamplingRatios ratios = SamplingRatios::scalar(spec.r);
  if (spec.mcar) {
    std::vector<double> rs(n);
    for (std::size_t i = 0; i < n; ++i) {
      CounterRng r_rng(spec.seed, trial, i, kStreamRatios);
      rs[i] = 1.0 + static_cast<double>(rbinom(r_rng, spec.mcar_m, spec.mcar_p));
    }
    ratios = SamplingRatios::per_coordinate(std::move(rs));
  }

  std::vector<long long> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng x_rng(spec.seed, trial, i, kStreamX);
    CounterRng y_rng(spec.seed, trial, i, kStreamY);
    x[i] = rpois(x_rng, ratios.at(i) * theta[i]);
    y[i] = rpois(y_rng, theta[i]);
  }
  return {std::move(theta), CountVector(std::move(x)),
          CountVector(std::move(y)), std::move(ratios)};
}

long long estimate_s_hat(const CountVector& x, SparsityMethod method,
                         long long fixed_s) {
  switch (method) {
    case SparsityMethod::count:
      return estimate_sparsity(x).s_hat;
    case SparsityMethod::count_gt1:
      return estimate_sparsity_per_period({x}).s_hat;
    case SparsityMethod::kmeans2:
      return estimate_sparsity_two_cluster(x).s_hat;
    case SparsityMethod::fixed:
      if (fixed_s < 1) {
        throw std::invalid_argument("estimate_s_hat: fixed s must be >= 1");
      }
      return fixed_s;
  }
  throw std::logic_error("estimate_s_hat: unknown method");
}

PredictiveDensity method_proposed(const CountVector& x,
                                  const SamplingRatios& ratios,
                                  const ProposedConfig& cfg) {
  double h;
  if (cfg.scale == ScaleRule::fixed) {
    h = cfg.fixed_h;
  } else {
    const long long s_hat = estimate_s_hat(x, cfg.sparsity, cfg.fixed_s);
    const double eta_hat =
        static_cast<double>(s_hat) / static_cast<double>(x.size());
    double scale_l;
    if (cfg.scale == ScaleRule::auto_lstar) {
      if (!ratios.is_scalar()) {
        throw std::invalid_argument(
            "method_proposed: auto-lstar needs a scalar ratio; use auto-lbar");
      }
      scale_l = optimal_scale(ratios.at(0), cfg.kappa);
    } else {
      scale_l = mcar_constants(ratios, cfg.kappa).l_bar;
    }
    h = scale_l * eta_hat;
  }
  return PredictiveDensity::fit(x, SpikeSlabPrior::power(h, cfg.kappa),
                                ratios);
}

PluginPoissonDensity::PluginPoissonDensity(const CountVector& x,
                                           const SamplingRatios& ratios,
                                           double lambda_reg)
    : x_(x.values()) {
  if (!(lambda_reg > 0.0)) {
    throw std::invalid_argument("PluginPoissonDensity: lambda_reg must be > 0");
  }
  ratios.check_length(x.size());
  theta_hat_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    theta_hat_[i] =
        static_cast<double>(x_[i]) / (ratios.at(i) * (1.0 + lambda_reg));
  }
}

double PluginPoissonDensity::coord_log_pmf(std::size_t i, long long y) const {
  const double th = theta_hat_[i];
  if (th == 0.0) return y == 0 ? 0.0 : kNegInf;
  return -th + static_cast<double>(y) * std::log(th) -
         std::lgamma(static_cast<double>(y) + 1.0);
}

double PluginPoissonDensity::joint_log_pmf(const CountVector& y) const {
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

long long PluginPoissonDensity::coord_quantile(std::size_t i, double p) const {
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("coord_quantile: p must be in [0,1)");
  }
  const double th = theta_hat_[i];
  if (th == 0.0) return 0;
  const long long cap = static_cast<long long>(
      std::ceil(th + 20.0 * std::sqrt(th + 1.0) + 60.0));
  double cdf = 0.0;
  for (long long y = 0; y <= cap; ++y) {
    cdf += std::exp(coord_log_pmf(i, y));
    if (cdf >= p) return y;
  }
  return cap;
}

long long PluginPoissonDensity::coord_quantile_midp(std::size_t i,
                                                    double p) const {
  const double th = theta_hat_[i];
  if (th == 0.0) return 0;
  const long long cap = static_cast<long long>(
      std::ceil(th + 20.0 * std::sqrt(th + 1.0) + 60.0));
  double cdf_prev = 0.0;
  for (long long y = 0; y <= cap; ++y) {
    const double pmf = std::exp(coord_log_pmf(i, y));
    if (cdf_prev + 0.5 * pmf >= p) return y;
    cdf_prev += pmf;
  }
  return cap;
}

double PluginPoissonDensity::coord_interval_mass(std::size_t i, long long lo,
                                                 long long hi) const {
  double mass = 0.0;
  for (long long y = std::max<long long>(lo, 0); y <= hi; ++y) {
    mass += std::exp(coord_log_pmf(i, y));
  }
  return mass;
}

long long PluginPoissonDensity::coord_sample(std::size_t i,
                                             CounterRng& rng) const {
  return rpois(rng, theta_hat_[i]);
}

PluginPoissonDensity method_l1_plugin(const CountVector& x,
                                      const SamplingRatios& ratios,
                                      double lambda_reg) {
  return PluginPoissonDensity(x, ratios, lambda_reg);
}

PredictiveDensity method_gamma_baseline(const CountVector& x,
                                        const SamplingRatios& ratios,
                                        double kappa) {
  return PredictiveDensity::fit_no_spike(x, kappa, ratios);
}

MethodSummary summarize(const std::string& name,
                        const std::vector<TrialMetrics>& metrics) {
  MethodSummary s;
  s.name = name;
  s.trials = static_cast<long long>(metrics.size());
  if (metrics.empty()) return s;

  auto mean_sd = [&](auto&& get, double& mean, double& sd) {
    double sum = 0.0;
    for (const TrialMetrics& m : metrics) sum += get(m);
    mean = sum / static_cast<double>(metrics.size());
    if (metrics.size() < 2) {
      sd = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    double ss = 0.0;
    for (const TrialMetrics& m : metrics) {
      const double d = get(m) - mean;
      ss += d * d;
    }
    sd = std::sqrt(ss / static_cast<double>(metrics.size() - 1));
  };
  mean_sd([](const TrialMetrics& m) { return m.l1; }, s.l1_mean, s.l1_sd);
  mean_sd([](const TrialMetrics& m) { return m.weighted_l1; }, s.wl1_mean,
          s.wl1_sd);
  mean_sd([](const TrialMetrics& m) { return m.covered ? 100.0 : 0.0; },
          s.coverage_pct, s.coverage_sd_pct);

  for (const TrialMetrics& m : metrics) {
    if (m.pll == kNegInf) ++s.pll_inf_trials;
  }
  if (s.pll_inf_trials > 0) {
    s.pll_mean = kNegInf;
    s.pll_sd = std::numeric_limits<double>::quiet_NaN();
  } else {
    mean_sd([](const TrialMetrics& m) { return m.pll; }, s.pll_mean, s.pll_sd);
  }
  return s;
}

TableResult run_table(const ScenarioSpec& spec,
                      const std::vector<MethodSpec>& methods, double alpha,
                      ExecMode mode) {
  spec.validate();
  if (methods.empty()) throw std::invalid_argument("run_table: no methods");

  TableResult result;
  result.per_trial.assign(methods.size(),
                          std::vector<TrialMetrics>(
                              static_cast<std::size_t>(spec.trials)));

  std::vector<std::size_t> simulated;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    if (methods[k].kind != MethodSpec::Kind::external) simulated.push_back(k);
  }

  parallel_for(static_cast<std::size_t>(spec.trials), mode, [&](std::size_t t) {
    const TrialData trial = generate_trial(spec, static_cast<long long>(t));
    for (std::size_t k : simulated) {
      const MethodSpec& m = methods[k];
      TrialMetrics tm{};
      switch (m.kind) {
        case MethodSpec::Kind::proposed:
          tm = compute_metrics(method_proposed(trial.x, trial.ratios,
                                               m.proposed),
                               trial.y, trial.ratios, alpha);
          break;
        case MethodSpec::Kind::l1_plugin:
          tm = compute_metrics(method_l1_plugin(trial.x, trial.ratios,
                                                m.lambda_reg),
                               trial.y, trial.ratios, alpha);
          break;
        case MethodSpec::Kind::gamma_baseline:
          tm = compute_metrics(method_gamma_baseline(trial.x, trial.ratios,
                                                     m.baseline_kappa),
                               trial.y, trial.ratios, alpha);
          break;
        case MethodSpec::Kind::external:
          break;
      }
      result.per_trial[k][t] = tm;
    }
  });

  for (std::size_t k = 0; k < methods.size(); ++k) {
    if (methods[k].kind == MethodSpec::Kind::external) {
      result.per_trial[k] = load_external_metrics(methods[k].csv_path);
    }
    result.summaries.push_back(
        summarize(methods[k].name, result.per_trial[k]));
  }
  return result;
}

std::vector<TrialMetrics> load_external_metrics(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  const std::size_t c_l1 = table.require_column("l1");
  const std::size_t c_wl1 = table.require_column("weighted_l1");
  const std::size_t c_pll = table.require_column("pll");
  const std::size_t c_cov = table.require_column("covered");
  std::vector<TrialMetrics> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const long long line = table.row_lines[i];
    TrialMetrics m{};
    m.l1 = parse_real(row[c_l1], line);
    m.weighted_l1 = parse_real(row[c_wl1], line);
    const std::string& pll = row[c_pll];
    m.pll = (pll == "-Inf" || pll == "-inf") ? kNegInf
                                             : parse_real(pll, line);
    m.covered = parse_count(row[c_cov], line) != 0;
    out.push_back(m);
  }
  if (out.empty()) throw CsvError("external metrics file has no rows", 1);
  return out;
}

}  // namespace sparse_poisson
