// Command-line front end: fit/predict from CSV count data, run simulation
// tables, export risk curves, and verify the minimax constants numerically.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparse_poisson/csv.hpp"
#include "sparse_poisson/harness.hpp"
#include "sparse_poisson/model.hpp"
#include "sparse_poisson/prediction_sets.hpp"
#include "sparse_poisson/predictive.hpp"
#include "sparse_poisson/risk.hpp"
#include "sparse_poisson/sparsity.hpp"

namespace sp = sparse_poisson;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct ScaleFlag {
  sp::ScaleRule rule = sp::ScaleRule::auto_lstar;
  double fixed_h = 0.0;
};

ScaleFlag parse_scale(const std::string& text) {
  if (text == "auto-lstar") return {sp::ScaleRule::auto_lstar, 0.0};
  if (text == "auto-lbar") return {sp::ScaleRule::auto_lbar, 0.0};
  if (text.rfind("fixed:", 0) == 0) {
    const double h = std::stod(text.substr(6));
    if (!(h > 0.0)) throw CLI::ValidationError("--scale fixed:<h> needs h > 0");
    return {sp::ScaleRule::fixed, h};
  }
  throw CLI::ValidationError(
      "--scale must be auto-lstar, auto-lbar or fixed:<h>");
}

struct SparsityFlag {
  sp::SparsityMethod method = sp::SparsityMethod::count;
  long long fixed_s = 1;
};

SparsityFlag parse_sparsity(const std::string& text) {
  if (text == "count") return {sp::SparsityMethod::count, 1};
  if (text == "count-gt1") return {sp::SparsityMethod::count_gt1, 1};
  if (text == "kmeans2") return {sp::SparsityMethod::kmeans2, 1};
  if (text.rfind("fixed:", 0) == 0) {
    const long long s = std::stoll(text.substr(6));
    if (s < 1) throw CLI::ValidationError("--sparsity fixed:<s> needs s >= 1");
    return {sp::SparsityMethod::fixed, s};
  }
  throw CLI::ValidationError(
      "--sparsity must be count, count-gt1, kmeans2 or fixed:<s>");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(std::stod(cell));
  }
  return out;
}

int cmd_predict(const std::string& input, const std::string& output,
                std::optional<double> r_flag, const std::string& r_column,
                double kappa, const std::string& scale_text,
                const std::string& sparsity_text, double alpha,
                std::uint64_t seed, long long calib_draws) {
  const ScaleFlag scale = parse_scale(scale_text);
  const SparsityFlag sparsity = parse_sparsity(sparsity_text);
  if (r_flag.has_value() == !r_column.empty()) {
    std::cerr << "predict: exactly one of --r and --r-column is required\n";
    return kExitUsage;
  }

  const sp::CsvTable table = sp::read_csv_file(input);
  const std::size_t id_col = table.require_column("id");
  const std::size_t x_col = table.require_column("x");
  int ratio_col = -1;
  if (!r_column.empty()) {
    ratio_col = table.column(r_column);
    if (ratio_col < 0) {
      throw sp::CsvError("ratio column '" + r_column + "' not found", 1);
    }
  }
  if (table.rows.empty()) throw sp::CsvError("no data rows", 2);

  std::vector<std::string> ids;
  std::vector<long long> counts;
  std::vector<double> ratios_raw;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const long long line = table.row_lines[i];
    ids.push_back(table.rows[i][id_col]);
    counts.push_back(sp::parse_count(table.rows[i][x_col], line));
    if (ratio_col >= 0) {
      const double r = sp::parse_real(
          table.rows[i][static_cast<std::size_t>(ratio_col)], line);
      if (!(r > 0.0)) throw sp::CsvError("ratios must be > 0", line);
      ratios_raw.push_back(r);
    }
  }
  const sp::CountVector x(counts);
  const sp::SamplingRatios ratios =
      ratio_col >= 0 ? sp::SamplingRatios::per_coordinate(ratios_raw)
                     : sp::SamplingRatios::scalar(*r_flag);

  sp::ProposedConfig cfg;
  cfg.kappa = kappa;
  cfg.scale = scale.rule;
  cfg.fixed_h = scale.fixed_h;
  cfg.sparsity = sparsity.method;
  cfg.fixed_s = sparsity.fixed_s;
  const sp::PredictiveDensity pd = sp::method_proposed(x, ratios, cfg);
  const sp::JointPredictionSet set =
      sp::calibrate(pd, alpha, calib_draws, seed);

  std::ofstream out(output);
  if (!out) {
    std::cerr << "predict: cannot write '" << output << "'\n";
    return kExitUsage;
  }
  out << "# sparse-poisson predict input=" << input << " kappa=" << fmt(kappa)
      << " scale=" << scale_text << " sparsity=" << sparsity_text
      << " alpha=" << fmt(alpha) << " seed=" << seed
      << " calib-draws=" << calib_draws;
  if (r_flag) out << " r=" << fmt(*r_flag);
  if (ratio_col >= 0) out << " r-column=" << r_column;
  out << "\n";
  out << "# h=" << fmt(pd.h()) << " s_hat="
      << sp::estimate_s_hat(x, cfg.sparsity, cfg.fixed_s)
      << " achieved_set_coverage=" << fmt(set.achieved) << "\n";
  out << "id,x,r,omega,mean,median,q05,q25,q75,q95,p_zero,set_lo,set_hi\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << ids[i] << ',' << x[i] << ',' << fmt(ratios.at(i)) << ','
        << fmt(pd.omega(i)) << ',' << fmt(pd.coord_mean(i)) << ','
        << pd.coord_quantile(i, 0.5) << ',' << pd.coord_quantile(i, 0.05)
        << ',' << pd.coord_quantile(i, 0.25) << ','
        << pd.coord_quantile(i, 0.75) << ',' << pd.coord_quantile(i, 0.95)
        << ',' << fmt(pd.coord_pmf(i, 0)) << ',' << set.lo[i] << ','
        << set.hi[i] << "\n";
  }
  return kExitOk;
}

sp::ScenarioSpec scenario_from_json(const json& j) {
  sp::ScenarioSpec spec;
  spec.n = j.at("n").get<long long>();
  spec.s = j.at("s").get<long long>();
  spec.trials = j.value("trials", spec.trials);
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("sparsity")) {
    const std::string kind = j.at("sparsity").get<std::string>();
    if (kind == "quasi") {
      spec.quasi = true;
      spec.xi_max = j.value("xi_max", spec.xi_max);
    } else if (kind != "exact") {
      throw std::invalid_argument("sparsity must be 'exact' or 'quasi'");
    }
  }
  spec.spike_shape = j.value("spike_shape", spec.spike_shape);
  spec.spike_scale = j.value("spike_scale", spec.spike_scale);
  const json& ratios = j.at("ratios");
  if (ratios.contains("scalar")) {
    spec.r = ratios.at("scalar").get<double>();
  } else if (ratios.contains("mcar")) {
    spec.mcar = true;
    spec.mcar_m = ratios.at("mcar").at("m").get<long long>();
    spec.mcar_p = ratios.at("mcar").at("p").get<double>();
  } else {
    throw std::invalid_argument("ratios needs 'scalar' or 'mcar'");
  }
  return spec;
}

std::vector<sp::MethodSpec> methods_from_json(const json& j) {
  std::vector<sp::MethodSpec> out;
  for (const json& m : j.at("methods")) {
    sp::MethodSpec spec;
    const std::string type = m.at("type").get<std::string>();
    spec.name = m.value("name", type);
    if (type == "proposed") {
      spec.kind = sp::MethodSpec::Kind::proposed;
      spec.proposed.kappa = m.value("kappa", 0.1);
      const ScaleFlag scale = parse_scale(m.value("scale", "auto-lstar"));
      spec.proposed.scale = scale.rule;
      spec.proposed.fixed_h = m.value("h", scale.fixed_h);
      if (m.contains("h")) spec.proposed.scale = sp::ScaleRule::fixed;
      const SparsityFlag sm = parse_sparsity(m.value("sparsity", "count"));
      spec.proposed.sparsity = sm.method;
      spec.proposed.fixed_s = sm.fixed_s;
    } else if (type == "l1-plugin") {
      spec.kind = sp::MethodSpec::Kind::l1_plugin;
      spec.lambda_reg = m.value("lambda", 0.1);
    } else if (type == "gamma-baseline") {
      spec.kind = sp::MethodSpec::Kind::gamma_baseline;
      spec.baseline_kappa = m.value("kappa", 1.0);
    } else if (type == "external") {
      spec.kind = sp::MethodSpec::Kind::external;
      spec.csv_path = m.at("csv").get<std::string>();
    } else {
      throw std::invalid_argument("unknown method type '" + type + "'");
    }
    out.push_back(std::move(spec));
  }
  return out;
}

int cmd_simulate(const std::string& config_path, const std::string& output,
                 std::optional<long long> trials_override,
                 std::optional<std::uint64_t> seed_override) {
  std::ifstream cfg(config_path);
  if (!cfg) {
    std::cerr << "simulate: cannot open config '" << config_path << "'\n";
    return kExitUsage;
  }
  json j;
  cfg >> j;
  sp::ScenarioSpec spec = scenario_from_json(j);
  if (trials_override) spec.trials = *trials_override;
  if (seed_override) spec.seed = *seed_override;
  const double alpha = j.value("alpha", 0.9);
  const std::vector<sp::MethodSpec> methods = methods_from_json(j);

  const sp::TableResult result = sp::run_table(spec, methods, alpha);

  std::ofstream out(output);
  if (!out) {
    std::cerr << "simulate: cannot write '" << output << "'\n";
    return kExitUsage;
  }
  out << "# sparse-poisson simulate config=" << config_path
      << " n=" << spec.n << " s=" << spec.s
      << " sparsity=" << (spec.quasi ? "quasi" : "exact");
  if (spec.mcar) {
    out << " mcar_m=" << spec.mcar_m << " mcar_p=" << fmt(spec.mcar_p);
  } else {
    out << " r=" << fmt(spec.r);
  }
  out << " trials=" << spec.trials << " seed=" << spec.seed
      << " alpha=" << fmt(alpha) << "\n";
  out << "method,metric,mean,sd\n";
  for (const sp::MethodSummary& s : result.summaries) {
    out << s.name << ",l1," << fmt(s.l1_mean) << ',' << fmt(s.l1_sd) << "\n";
    out << s.name << ",weighted_l1," << fmt(s.wl1_mean) << ','
        << fmt(s.wl1_sd) << "\n";
    out << s.name << ",pll," << fmt(s.pll_mean) << ',' << fmt(s.pll_sd)
        << "\n";
    out << s.name << ",coverage_pct," << fmt(s.coverage_pct) << ','
        << fmt(s.coverage_sd_pct) << "\n";
  }
  return kExitOk;
}

int cmd_verify(double r, double kappa, const std::string& eta_text,
               const std::string& output) {
  const std::vector<double> etas = parse_list(eta_text);
  if (etas.empty()) {
    std::cerr << "verify: --eta needs a comma-separated list in (0,1)\n";
    return kExitUsage;
  }
  const double c = sp::constant_c(r);
  const double est_const = std::exp(-1.0) / r;

  json rows = json::array();
  std::vector<double> pred_ratios, est_ratios;
  for (double eta : etas) {
    if (!(eta > 0.0) || !(eta < 1.0)) {
      std::cerr << "verify: eta values must be in (0,1)\n";
      return kExitUsage;
    }
    const sp::SupRisk sup = sp::sup_risk(eta, kappa, r);
    const sp::SupRisk est = sp::sup_estimation_risk(eta, kappa, r);
    const double rho0 = sp::coord_risk_rho(0.0, eta, kappa, r);
    const double log_inv = std::log(1.0 / eta);
    const double m = std::floor(1.0 / eta);
    const double lower = c * std::log(std::max(1.0, m));
    const double upper = sup.sup_rho + (1.0 / eta - 1.0) * rho0;
    json row;
    row["eta"] = eta;
    row["sup_rho"] = sup.sup_rho;
    row["argmax_lambda"] = sup.argmax_lambda;
    row["ratio_to_c_log"] = sup.sup_rho / (c * log_inv);
    row["rho0"] = rho0;
    row["estimation_sup"] = est.sup_rho;
    row["estimation_argmax"] = est.argmax_lambda;
    row["estimation_ratio"] = est.sup_rho / (est_const * log_inv);
    row["block_lower_bound"] = lower;
    row["upper_bound_implied"] = upper;
    row["lower_le_upper"] = lower <= upper;
    rows.push_back(row);
    pred_ratios.push_back(sup.sup_rho / (c * log_inv));
    est_ratios.push_back(est.sup_rho / (est_const * log_inv));
  }
  auto decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] >= v[i - 1]) return false;
    }
    return true;
  };
  json report;
  report["r"] = r;
  report["kappa"] = kappa;
  report["constant_c"] = c;
  report["estimation_constant"] = est_const;
  report["per_eta"] = rows;
  report["prediction_ratio_decreasing"] = decreasing(pred_ratios);
  report["estimation_ratio_decreasing"] = decreasing(est_ratios);

  std::ofstream out(output);
  if (!out) {
    std::cerr << "verify: cannot write '" << output << "'\n";
    return kExitUsage;
  }
  out << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_risk_curve(double r, double kappa, double h,
                   const std::string& lambdas_text, double lambda_min,
                   double lambda_max, long long points,
                   const std::string& output) {
  std::vector<double> grid;
  if (!lambdas_text.empty()) {
    grid = parse_list(lambdas_text);
  } else {
    if (points < 1 || !(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
      std::cerr << "risk-curve: need --lambdas or a valid log grid\n";
      return kExitUsage;
    }
    for (long long i = 0; i < points; ++i) {
      const double f = points == 1 ? 0.0
                                   : static_cast<double>(i) /
                                         static_cast<double>(points - 1);
      grid.push_back(std::exp(std::log(lambda_min) +
                              f * (std::log(lambda_max) -
                                   std::log(lambda_min))));
    }
  }
  if (grid.empty()) {
    std::cerr << "risk-curve: empty grid\n";
    return kExitUsage;
  }
  const std::vector<double> rho = sp::rho_curve(grid, h, kappa, r);
  std::ofstream out(output);
  if (!out) {
    std::cerr << "risk-curve: cannot write '" << output << "'\n";
    return kExitUsage;
  }
  out << "# sparse-poisson risk-curve r=" << fmt(r) << " kappa=" << fmt(kappa)
      << " h=" << fmt(h) << "\n";
  out << "lambda,rho\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << fmt(grid[i]) << ',' << fmt(rho[i]) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Minimax predictive densities for sparse Poisson count data"};
  app.require_subcommand(1);

  // predict
  auto* predict = app.add_subcommand(
      "predict", "Fit the predictive density to CSV counts");
  std::string in_path, out_path = "predict.csv", r_column;
  std::optional<double> r_flag;
  double kappa = 0.1, alpha = 0.9;
  std::string scale_text = "auto-lstar", sparsity_text = "count";
  std::uint64_t seed = 1;
  long long calib_draws = 20000;
  predict->add_option("--input", in_path, "input CSV with columns id,x")
      ->required();
  predict->add_option("--output", out_path, "output CSV path");
  predict->add_option("--r", r_flag, "scalar sampling ratio");
  predict->add_option("--r-column", r_column,
                      "CSV column holding per-coordinate ratios");
  predict->add_option("--kappa", kappa, "slab exponent kappa > 0");
  predict->add_option("--scale", scale_text,
                      "auto-lstar | auto-lbar | fixed:<h>");
  predict->add_option("--sparsity", sparsity_text,
                      "count | count-gt1 | kmeans2 | fixed:<s>");
  predict->add_option("--alpha", alpha, "prediction set level in (0,1)");
  predict->add_option("--seed", seed, "calibration seed");
  predict->add_option("--calib-draws", calib_draws,
                      "predictive draws for set calibration");

  // simulate
  auto* simulate =
      app.add_subcommand("simulate", "Run a seeded simulation table");
  std::string config_path, sim_out = "table.csv";
  std::optional<long long> trials_override;
  std::optional<std::uint64_t> seed_override;
  simulate->add_option("--config", config_path, "scenario JSON")->required();
  simulate->add_option("--output", sim_out, "summary CSV path");
  simulate->add_option("--trials", trials_override, "override trial count");
  simulate->add_option("--seed", seed_override, "override seed");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Numeric verification of the minimax constants");
  double v_r = 1.0, v_kappa = 1.0;
  std::string eta_text = "1e-2,1e-3,1e-4,1e-5,1e-6";
  std::string verify_out = "verify.json";
  verify->add_option("--r", v_r, "sampling ratio");
  verify->add_option("--kappa", v_kappa, "slab exponent");
  verify->add_option("--eta", eta_text, "comma list of eta values in (0,1)");
  verify->add_option("--output", verify_out, "JSON report path");

  // risk-curve
  auto* curve = app.add_subcommand("risk-curve",
                                   "Export the coordinate risk curve as CSV");
  double c_r = 1.0, c_kappa = 1.0, c_h = 0.025;
  std::string lambdas_text;
  double lambda_min = 1e-3, lambda_max = 50.0;
  long long points = 0;
  std::string curve_out = "risk_curve.csv";
  curve->add_option("--r", c_r, "sampling ratio");
  curve->add_option("--kappa", c_kappa, "slab exponent");
  curve->add_option("--slab-h", c_h, "slab scale h");
  curve->add_option("--lambdas", lambdas_text, "explicit comma list");
  curve->add_option("--lambda-min", lambda_min, "log-grid lower end");
  curve->add_option("--lambda-max", lambda_max, "log-grid upper end");
  curve->add_option("--points", points, "log-grid size");
  curve->add_option("--output", curve_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (predict->parsed()) {
      return cmd_predict(in_path, out_path, r_flag, r_column, kappa,
                         scale_text, sparsity_text, alpha, seed, calib_draws);
    }
    if (simulate->parsed()) {
      return cmd_simulate(config_path, sim_out, trials_override,
                          seed_override);
    }
    if (verify->parsed()) {
      return cmd_verify(v_r, v_kappa, eta_text, verify_out);
    }
    if (curve->parsed()) {
      return cmd_risk_curve(c_r, c_kappa, c_h, lambdas_text, lambda_min,
                            lambda_max, points, curve_out);
    }
  } catch (const sp::CsvError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
