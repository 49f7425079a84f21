#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "sparse_poisson/harness.hpp"
#include "sparse_poisson/sparsity.hpp"

using namespace sparse_poisson;

TEST_CASE("trial generation") {
  ScenarioSpec spec;
  spec.n = 50;
  spec.s = 4;
  spec.r = 2.0;
  spec.seed = 11;

  SUBCASE("exact sparsity puts exactly s spikes") {
    for (long long t = 0; t < 20; ++t) {
      const TrialData trial = generate_trial(spec, t);
      long long nonzero = 0;
      for (double v : trial.theta) {
        if (v > 0.0) ++nonzero;
      }
      CHECK(nonzero == spec.s);
    }
  }
  SUBCASE("quasi sparsity fills the complement below xi_max") {
    ScenarioSpec quasi = spec;
    quasi.quasi = true;
    const TrialData trial = generate_trial(quasi, 3);
    long long small = 0, large = 0;
    for (double v : trial.theta) {
      CHECK(v > 0.0);
      if (v <= quasi.xi_max) {
        ++small;
      } else {
        ++large;
      }
    }
    CHECK(large == quasi.s);
    CHECK(small == quasi.n - quasi.s);
  }
  SUBCASE("mcar with p = 0 gives unit ratios") {
    ScenarioSpec mcar = spec;
    mcar.mcar = true;
    mcar.mcar_m = 1;
    mcar.mcar_p = 0.0;
    const TrialData trial = generate_trial(mcar, 0);
    for (std::size_t i = 0; i < trial.x.size(); ++i) {
      CHECK(trial.ratios.at(i) == 1.0);
    }
  }
  SUBCASE("mcar ratios are 1 + binomial") {
    ScenarioSpec mcar = spec;
    mcar.mcar = true;
    mcar.mcar_m = 10;
    mcar.mcar_p = 0.9;
    const TrialData trial = generate_trial(mcar, 1);
    for (std::size_t i = 0; i < trial.x.size(); ++i) {
      CHECK(trial.ratios.at(i) >= 1.0);
      CHECK(trial.ratios.at(i) <= 11.0);
    }
  }
  SUBCASE("deterministic per (seed, trial)") {
    const TrialData a = generate_trial(spec, 7);
    const TrialData b = generate_trial(spec, 7);
    CHECK(a.theta == b.theta);
    CHECK(a.x.values() == b.x.values());
    CHECK(a.y.values() == b.y.values());
    const TrialData c = generate_trial(spec, 8);
    CHECK(a.x.values() != c.x.values());
  }
  SUBCASE("spec validation") {
    ScenarioSpec bad = spec;
    bad.s = bad.n;
    CHECK_THROWS_AS(generate_trial(bad, 0), std::invalid_argument);
  }
}

TEST_CASE("proposed method scaling") {
  SUBCASE("h = L* eta_hat for the adaptive rule") {
    // shat = 5 of 200 at kappa = 0.1, r = 1: h = 0.39240852... * 0.025
    std::vector<long long> x(200, 0);
    for (int k = 0; k < 5; ++k) x[static_cast<std::size_t>(k) * 17] = 3;
    ProposedConfig cfg;
    cfg.kappa = 0.1;
    cfg.scale = ScaleRule::auto_lstar;
    const PredictiveDensity pd =
        method_proposed(CountVector(x), SamplingRatios::scalar(1.0), cfg);
    CHECK(pd.h() == doctest::Approx(0.0098102131765517).epsilon(1e-10));
  }
  SUBCASE("fixed h bypasses adaptation") {
    ProposedConfig cfg;
    cfg.kappa = 1.0;
    cfg.scale = ScaleRule::fixed;
    cfg.fixed_h = 0.025;
    const PredictiveDensity pd = method_proposed(
        CountVector({0, 2}), SamplingRatios::scalar(1.0), cfg);
    CHECK(pd.h() == 0.025);
    CHECK(pd.omega(0) == doctest::Approx(0.9756097560975610).epsilon(1e-12));
  }
  SUBCASE("all-equal mcar ratios reduce L-bar to L*") {
    ProposedConfig star;
    star.kappa = 0.1;
    star.scale = ScaleRule::auto_lstar;
    ProposedConfig bar = star;
    bar.scale = ScaleRule::auto_lbar;
    const CountVector x({0, 1, 0, 4});
    const PredictiveDensity a =
        method_proposed(x, SamplingRatios::scalar(3.0), star);
    const PredictiveDensity b = method_proposed(
        x, SamplingRatios::per_coordinate({3.0, 3.0, 3.0, 3.0}), bar);
    CHECK(a.h() == doctest::Approx(b.h()).epsilon(1e-12));
  }
  SUBCASE("auto-lstar rejects per-coordinate ratios") {
    ProposedConfig cfg;
    cfg.scale = ScaleRule::auto_lstar;
    CHECK_THROWS_AS(method_proposed(CountVector({1, 0}),
                                    SamplingRatios::per_coordinate({1.0, 2.0}),
                                    cfg),
                    std::invalid_argument);
  }
  SUBCASE("sparsity method selection") {
    const CountVector x({0, 0, 0, 10, 11});
    CHECK(estimate_s_hat(x, SparsityMethod::count, 0) == 2);
    CHECK(estimate_s_hat(x, SparsityMethod::count_gt1, 0) == 2);
    CHECK(estimate_s_hat(x, SparsityMethod::kmeans2, 0) == 2);
    CHECK(estimate_s_hat(x, SparsityMethod::fixed, 7) == 7);
  }
}

TEST_CASE("l1 plug-in") {
  const CountVector x({0, 5});
  const PluginPoissonDensity plugin =
      method_l1_plugin(x, SamplingRatios::scalar(1.0), 0.1);
  CHECK(plugin.theta_hat(0) == 0.0);
  CHECK(plugin.theta_hat(1) ==
        doctest::Approx(4.545454545454546).epsilon(1e-12));
  // point mass at zero where the count was zero
  CHECK(plugin.coord_log_pmf(0, 0) == 0.0);
  CHECK(plugin.coord_log_pmf(0, 1) ==
        -std::numeric_limits<double>::infinity());
  CHECK(plugin.joint_log_pmf(CountVector({1, 4})) ==
        -std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(plugin.joint_log_pmf(CountVector({0, 4}))));
}

TEST_CASE("gamma baseline") {
  const CountVector x({0, 3});
  const SamplingRatios r = SamplingRatios::scalar(1.0);
  const PredictiveDensity base = method_gamma_baseline(x, r, 1.0);
  const PredictiveDensity proposed = PredictiveDensity::fit(
      x, SpikeSlabPrior::power(0.025, 1.0), r);
  // identical to the proposed coordinate density wherever x >= 1
  for (long long y = 0; y <= 20; ++y) {
    CHECK(base.coord_log_pmf(1, y) ==
          doctest::Approx(proposed.coord_log_pmf(1, y)).epsilon(1e-12));
  }
  // no spike at x = 0: NB mean (0+1)/1 = 1
  CHECK(base.omega(0) == 0.0);
  CHECK(base.coord_mean(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(base.coord_pmf(0, 0) < proposed.coord_pmf(0, 0));
}

TEST_CASE("metrics") {
  const SamplingRatios r1 = SamplingRatios::scalar(1.0);
  SUBCASE("zero distance when y equals the predictive mean") {
    const PredictiveDensity base =
        method_gamma_baseline(CountVector({1, 3}), r1, 1.0);
    // means are (1+1)/1 = 2 and (3+1)/1 = 4
    const TrialMetrics m =
        compute_metrics(base, CountVector({2, 4}), r1, 0.9);
    CHECK(m.l1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.weighted_l1 == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("equal ratios collapse the weighted distance") {
    const PredictiveDensity pd = PredictiveDensity::fit(
        CountVector({2, 0, 7}), SpikeSlabPrior::power(0.01, 0.1),
        SamplingRatios::scalar(4.0));
    const TrialMetrics m = compute_metrics(pd, CountVector({1, 0, 2}),
                                           SamplingRatios::scalar(4.0), 0.9);
    CHECK(m.weighted_l1 == doctest::Approx(m.l1).epsilon(1e-12));
  }
  SUBCASE("weighted distance uses r-proportional weights") {
    const SamplingRatios rr = SamplingRatios::per_coordinate({1.0, 3.0});
    const PluginPoissonDensity plugin =
        method_l1_plugin(CountVector({2, 3}), rr, 0.1);
    const TrialMetrics m = compute_metrics(plugin, CountVector({0, 0}), rr,
                                           0.9);
    const double d0 = plugin.coord_mean(0), d1 = plugin.coord_mean(1);
    CHECK(m.weighted_l1 ==
          doctest::Approx((1.0 * d0 + 3.0 * d1) / ((1.0 + 3.0) / 2.0))
              .epsilon(1e-12));
  }
  SUBCASE("divergent pll propagates and coverage fails on positives") {
    std::vector<long long> x(6, 0), y(6, 0);
    y[2] = 3;
    const PluginPoissonDensity plugin =
        method_l1_plugin(CountVector(x), SamplingRatios::scalar(1.0), 0.1);
    const TrialMetrics m =
        compute_metrics(plugin, CountVector(y), SamplingRatios::scalar(1.0),
                        0.9);
    CHECK(m.pll == -std::numeric_limits<double>::infinity());
    CHECK_FALSE(m.covered);
  }
}

TEST_CASE("table runs") {
  ScenarioSpec spec;
  spec.n = 60;
  spec.s = 3;
  spec.r = 1.0;
  spec.trials = 24;
  spec.seed = 5;

  std::vector<MethodSpec> methods(2);
  methods[0].kind = MethodSpec::Kind::proposed;
  methods[0].name = "proposed";
  methods[0].proposed.kappa = 0.1;
  methods[1].kind = MethodSpec::Kind::l1_plugin;
  methods[1].name = "l1";
  methods[1].lambda_reg = 0.1;

  const TableResult run = run_table(spec, methods, 0.9);
  CHECK(run.summaries.size() == 2);
  CHECK(run.summaries[0].trials == 24);
  CHECK(run.summaries[0].l1_mean > 0.0);
  CHECK(run.summaries[0].l1_sd >= 0.0);
  CHECK(run.summaries[0].coverage_pct >= 0.0);
  CHECK(run.summaries[0].coverage_pct <= 100.0);
  CHECK(std::isfinite(run.summaries[0].pll_mean));

  SUBCASE("bit-identical rerun and serial equivalence") {
    const TableResult again = run_table(spec, methods, 0.9);
    CHECK(again.summaries[0].l1_mean == run.summaries[0].l1_mean);
    CHECK(again.summaries[1].pll_mean == run.summaries[1].pll_mean);
    const TableResult serial = run_table(spec, methods, 0.9, ExecMode::serial);
    CHECK(serial.summaries[0].l1_mean == run.summaries[0].l1_mean);
    CHECK(serial.summaries[0].coverage_pct == run.summaries[0].coverage_pct);
  }
  SUBCASE("single-trial run leaves the sd undefined") {
    ScenarioSpec one = spec;
    one.trials = 1;
    const TableResult r1 = run_table(one, methods, 0.9);
    CHECK(std::isnan(r1.summaries[0].l1_sd));
  }
}

TEST_CASE("mcar table end to end with the averaged scale") {
  ScenarioSpec spec;
  spec.n = 200;
  spec.s = 5;
  spec.mcar = true;
  spec.mcar_m = 10;
  spec.mcar_p = 0.9;
  spec.trials = 200;
  spec.seed = 23;

  std::vector<MethodSpec> methods(1);
  methods[0].kind = MethodSpec::Kind::proposed;
  methods[0].name = "proposed";
  methods[0].proposed.kappa = 0.1;
  methods[0].proposed.scale = ScaleRule::auto_lbar;

  const MethodSummary s = run_table(spec, methods, 0.9).summaries[0];
  CHECK(std::isfinite(s.pll_mean));
  CHECK(s.wl1_mean > 0.0);
  // heterogeneous ratios separate the weighted and unweighted distances
  CHECK(s.wl1_mean != doctest::Approx(s.l1_mean).epsilon(1e-6));
  // r_i in [1, 11] around 10: the weighted distance stays in the
  // neighbourhood seen for the homogeneous r = 10..20 runs
  CHECK(s.wl1_mean > 8.0);
  CHECK(s.wl1_mean < 18.0);
  CHECK(s.coverage_pct > 80.0);
}

TEST_CASE("thread cap does not change results") {
  ScenarioSpec spec;
  spec.n = 80;
  spec.s = 4;
  spec.r = 1.0;
  spec.trials = 40;
  spec.seed = 3;
  std::vector<MethodSpec> methods(1);
  methods[0].kind = MethodSpec::Kind::proposed;
  methods[0].name = "p";
  const TableResult base = run_table(spec, methods, 0.9);
  setenv("SPARSE_POISSON_THREADS", "1", 1);
  const TableResult capped = run_table(spec, methods, 0.9);
  unsetenv("SPARSE_POISSON_THREADS");
  CHECK(base.summaries[0].l1_mean == capped.summaries[0].l1_mean);
  CHECK(base.summaries[0].pll_mean == capped.summaries[0].pll_mean);
  CHECK(base.summaries[0].coverage_pct == capped.summaries[0].coverage_pct);
}

TEST_CASE("proposed beats the plug-in pll wherever the plug-in diverges") {
  ScenarioSpec spec;
  spec.n = 200;
  spec.s = 5;
  spec.r = 1.0;
  spec.trials = 120;
  spec.seed = 19;  // a seed whose trials include x=0,y>0 coordinates

  std::vector<MethodSpec> methods(2);
  methods[0].kind = MethodSpec::Kind::proposed;
  methods[0].name = "proposed";
  methods[0].proposed.kappa = 0.1;
  methods[1].kind = MethodSpec::Kind::l1_plugin;
  methods[1].name = "l1";

  const TableResult run = run_table(spec, methods, 0.9);
  REQUIRE(run.summaries[1].pll_inf_trials > 0);
  CHECK(std::isfinite(run.summaries[0].pll_mean));
  CHECK(run.summaries[0].pll_mean > run.summaries[1].pll_mean);
  // per trial: the proposed density never loses all mass
  for (const TrialMetrics& m : run.per_trial[0]) {
    CHECK(std::isfinite(m.pll));
  }
}

TEST_CASE("quasi-sparse scenario does not collapse the proposed method") {
  ScenarioSpec exact;
  exact.n = 200;
  exact.s = 5;
  exact.r = 20.0;
  exact.trials = 300;
  exact.seed = 21;
  ScenarioSpec quasi = exact;
  quasi.quasi = true;

  std::vector<MethodSpec> methods(1);
  methods[0].kind = MethodSpec::Kind::proposed;
  methods[0].name = "proposed";
  methods[0].proposed.kappa = 0.1;

  const MethodSummary e = run_table(exact, methods, 0.9).summaries[0];
  const MethodSummary q = run_table(quasi, methods, 0.9).summaries[0];
  // the near-zero background adds a bounded amount of l1 and log-likelihood
  // mass; point prediction and coverage stay close to the exact-sparse run
  CHECK(std::fabs(q.l1_mean - e.l1_mean) / e.l1_mean < 0.25);
  CHECK(std::fabs(q.coverage_pct - e.coverage_pct) < 8.0);
  CHECK(std::isfinite(q.pll_mean));
  CHECK(q.pll_mean > e.pll_mean - 10.0);
}

TEST_CASE("external metric ingestion") {
  const std::string path = "external_metrics_test.csv";
  {
    std::ofstream out(path);
    out << "trial,l1,weighted_l1,pll,covered\n";
    out << "0,10.5,10.5,-12.0,1\n";
    out << "1,12.0,12.5,-Inf,0\n";
  }
  const std::vector<TrialMetrics> rows = load_external_metrics(path);
  CHECK(rows.size() == 2);
  CHECK(rows[1].pll == -std::numeric_limits<double>::infinity());
  const MethodSummary s = summarize("ext", rows);
  CHECK(s.l1_mean == doctest::Approx(11.25));
  CHECK(s.pll_mean == -std::numeric_limits<double>::infinity());
  CHECK(s.pll_inf_trials == 1);
  CHECK(s.coverage_pct == doctest::Approx(50.0));
  std::remove(path.c_str());
}
