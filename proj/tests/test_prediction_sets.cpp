#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sparse_poisson/harness.hpp"
#include "sparse_poisson/prediction_sets.hpp"
#include "sparse_poisson/predictive.hpp"

using namespace sparse_poisson;

namespace {

PredictiveDensity fit_simple(std::vector<long long> x, double h, double kappa,
                             double r) {
  return PredictiveDensity::fit(CountVector(std::move(x)),
                                SpikeSlabPrior::power(h, kappa),
                                SamplingRatios::scalar(r));
}

}  // namespace

TEST_CASE("membership") {
  JointPredictionSet set;
  set.lo = {0, 2, 1};
  set.hi = {3, 2, 9};
  set.alpha = 0.9;
  set.achieved = 0.9;
  CHECK(contains(set, CountVector({0, 2, 1})));   // lower bounds included
  CHECK(contains(set, CountVector({3, 2, 9})));   // upper bounds included
  CHECK_FALSE(contains(set, CountVector({0, 2, 10})));
  CHECK_FALSE(contains(set, CountVector({0, 1, 5})));
  CHECK_THROWS_AS(contains(set, CountVector({1, 1})), std::invalid_argument);

  JointPredictionSet degenerate;
  degenerate.lo = {0, 0};
  degenerate.hi = {0, 0};
  degenerate.alpha = 0.9;
  degenerate.achieved = 1.0;
  CHECK(contains(degenerate, CountVector({0, 0})));
}

TEST_CASE("calibrate on a single coordinate reduces to the marginal interval") {
  const PredictiveDensity pd = fit_simple({6}, 0.025, 1.0, 1.0);
  const JointPredictionSet set = calibrate(pd, 0.9, 40000, 99);
  CHECK(set.achieved >= 0.9);
  // coordinate equal-tail interval at level ~alpha (bisection tolerance)
  CHECK(set.lo[0] == pd.coord_quantile(0, 0.05));
  CHECK(set.hi[0] >= pd.coord_quantile(0, 0.95) - 1);
  CHECK(set.hi[0] <= pd.coord_quantile(0, 0.95) + 1);
}

TEST_CASE("calibrate generalizes out of sample") {
  // a sparse-looking fit: three active coordinates, many zeros. The
  // coverage function of the shared level beta is a step function whose
  // jumps are collective flips of the identical zero coordinates, so the
  // achieved level can overshoot alpha; the contract is achieved >= alpha
  // and agreement between in-sample and independent draws.
  std::vector<long long> x(40, 0);
  x[3] = 9;
  x[17] = 4;
  x[31] = 22;
  const PredictiveDensity pd = fit_simple(x, 0.02, 0.1, 1.0);
  const JointPredictionSet set = calibrate(pd, 0.9, 20000, 4242);
  CHECK(set.achieved >= 0.9);

  // out-of-sample draws from an independent stream
  const long long m = 100000;
  long long inside = 0;
  for (long long j = 0; j < m; ++j) {
    bool ok = true;
    for (std::size_t i = 0; i < pd.size(); ++i) {
      CounterRng rng(777777, static_cast<std::uint64_t>(j), i);
      const long long v = pd.coord_sample(i, rng);
      if (v < set.lo[i] || v > set.hi[i]) {
        ok = false;
        break;
      }
    }
    if (ok) ++inside;
  }
  const double cov = static_cast<double>(inside) / static_cast<double>(m);
  CHECK(cov >= 0.895);
  CHECK(std::fabs(cov - set.achieved) < 0.01);
}

TEST_CASE("calibrate monotone in alpha") {
  std::vector<long long> x(12, 0);
  x[2] = 8;
  x[9] = 3;
  const PredictiveDensity pd = fit_simple(x, 0.05, 1.0, 1.0);
  const JointPredictionSet narrow = calibrate(pd, 0.8, 20000, 5);
  const JointPredictionSet wide = calibrate(pd, 0.95, 20000, 5);
  for (std::size_t i = 0; i < pd.size(); ++i) {
    CHECK(wide.lo[i] <= narrow.lo[i]);
    CHECK(wide.hi[i] >= narrow.hi[i]);
  }
}

TEST_CASE("calibrate approaches full support as alpha -> 1") {
  std::vector<long long> x(8, 0);
  x[5] = 12;
  const PredictiveDensity pd = fit_simple(x, 0.05, 1.0, 1.0);
  const JointPredictionSet set = calibrate(pd, 0.995, 20000, 31);
  CHECK(set.achieved >= 0.995);
  const JointPredictionSet narrower = calibrate(pd, 0.9, 20000, 31);
  CHECK(set.hi[5] >= narrower.hi[5]);
}

TEST_CASE("calibrate input validation") {
  const PredictiveDensity pd = fit_simple({1}, 0.025, 1.0, 1.0);
  CHECK_THROWS_AS(calibrate(pd, 0.0, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(calibrate(pd, 1.0, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(calibrate(pd, 0.9, 0, 1), std::invalid_argument);
}

TEST_CASE("support-adjusted set") {
  SUBCASE("single active coordinate gets the marginal level") {
    std::vector<long long> x(30, 0);
    x[7] = 11;
    const PredictiveDensity pd = fit_simple(x, 0.02, 0.1, 1.0);
    const JointPredictionSet set = support_adjusted_set(pd, 0.9);
    CHECK(set.lo[7] == pd.coord_quantile_midp(7, 0.05));
    CHECK(set.hi[7] == pd.coord_quantile_midp(7, 0.95));
    // zero-count coordinates start at zero and stay narrow but nonempty
    CHECK(set.lo[0] == 0);
    CHECK(set.hi[0] >= 0);
    CHECK(set.achieved > 0.85);
  }
  SUBCASE("monotone in alpha") {
    std::vector<long long> x(20, 0);
    x[1] = 5;
    x[8] = 14;
    const PredictiveDensity pd = fit_simple(x, 0.05, 1.0, 1.0);
    const JointPredictionSet a = support_adjusted_set(pd, 0.8);
    const JointPredictionSet b = support_adjusted_set(pd, 0.95);
    for (std::size_t i = 0; i < pd.size(); ++i) {
      CHECK(b.lo[i] <= a.lo[i]);
      CHECK(b.hi[i] >= a.hi[i]);
    }
  }
  SUBCASE("degenerate plug-in reproduces the narrow-set pathology") {
    std::vector<long long> x(10, 0);
    x[4] = 6;
    const PluginPoissonDensity plugin(CountVector(x),
                                      SamplingRatios::scalar(1.0), 0.1);
    const JointPredictionSet set = support_adjusted_set(plugin, 0.9);
    for (std::size_t i = 0; i < 10; ++i) {
      if (i == 4) continue;
      CHECK(set.lo[i] == 0);
      CHECK(set.hi[i] == 0);  // point mass at zero: interval collapses
    }
    // any positive y at a collapsed coordinate breaks coverage
    std::vector<long long> y(10, 0);
    y[2] = 1;
    CHECK_FALSE(contains(set, CountVector(y)));
  }
}
