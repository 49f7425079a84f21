#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sparse_poisson/quadrature.hpp"

using namespace sparse_poisson;

TEST_CASE("adaptive integrator on smooth targets") {
  CHECK(adaptive_integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // narrow peak must not be missed thanks to the initial split
  const double v = adaptive_integrate(
      [](double x) { return std::exp(-1e4 * (x - 0.37) * (x - 0.37)); }, -40.0,
      40.0, 1e-10, 64);
  CHECK(v == doctest::Approx(std::sqrt(M_PI / 1e4)).epsilon(1e-8));
}

TEST_CASE("gauss legendre integrates polynomials of degree 2n-1") {
  const auto nodes = gauss_legendre(6);
  double sum = 0.0;
  for (const auto& [x, w] : nodes) {
    sum += w * (5.0 * std::pow(x, 11) + x * x + 1.0);
  }
  // odd powers cancel; int_-1^1 (x^2 + 1) = 8/3
  CHECK(sum == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
  double total_w = 0.0;
  for (const auto& [x, w] : nodes) total_w += w;
  CHECK(total_w == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("slab integral against gamma-function closed forms") {
  // gamma(lambda) = lambda^(kappa-1) gives I(s;t) = Gamma(s+kappa-1)/t^(s+kappa-1)
  auto power_log = [](double kappa) {
    return [kappa](double lam) { return (kappa - 1.0) * std::log(lam); };
  };
  SUBCASE("kappa = 1, s = 2, t = 1") {
    CHECK(std::exp(log_slab_integral(power_log(1.0), 2.0, 1.0, 1e-10)) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("general (s, t) grid at kappa = 1") {
    for (double s : {1.0, 3.0, 7.5}) {
      for (double t : {0.5, 1.0, 21.0}) {
        const double expect =
            std::lgamma(s) - s * std::log(t);
        CHECK(log_slab_integral(power_log(1.0), s, t, 1e-10) ==
              doctest::Approx(expect).epsilon(1e-9));
      }
    }
  }
  SUBCASE("mildly singular kappa = 0.6") {
    const double expect = std::lgamma(1.6) - 1.6 * std::log(2.0);
    CHECK(log_slab_integral(power_log(0.6), 2.0, 2.0, 1e-10) ==
          doctest::Approx(expect).epsilon(1e-8));
  }
  SUBCASE("large s stays in range through log scaling") {
    const double expect = std::lgamma(52.0) - 52.0 * std::log(1.0 + 1.0);
    CHECK(log_slab_integral(power_log(1.0), 52.0, 2.0, 1e-10) ==
          doctest::Approx(expect).epsilon(1e-9));
    // would overflow a direct double evaluation
    const double huge = log_slab_integral(power_log(1.0), 1002.0, 1.0, 1e-9);
    CHECK(huge == doctest::Approx(std::lgamma(1002.0)).epsilon(1e-8));
  }
}

TEST_CASE("half-cauchy slab integral") {
  auto hc = [](double lam) {
    return std::log(2.0 / M_PI) - std::log1p(lam * lam);
  };
  // frozen from an independent high-precision quadrature
  CHECK(std::exp(log_slab_integral(hc, 1.0, 1.0, 1e-10)) ==
        doctest::Approx(0.3956271183189226).epsilon(1e-8));
  SUBCASE("decreasing in t for fixed s") {
    double prev = 1e300;
    for (double t : {0.5, 1.0, 2.0, 8.0}) {
      const double v = log_slab_integral(hc, 3.0, t, 1e-10);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("power slab scaling identity I(s;ct) = c^-(s+kappa-1) I(s;t)") {
  const double kappa = 0.8;
  auto lg = [kappa](double lam) { return (kappa - 1.0) * std::log(lam); };
  for (double c : {2.0, 5.0}) {
    for (double s : {1.0, 4.0}) {
      const double lhs = log_slab_integral(lg, s, c * 1.3, 1e-10);
      const double rhs =
          log_slab_integral(lg, s, 1.3, 1e-10) - (s + kappa - 1.0) * std::log(c);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("non-integrable slabs raise integrability errors") {
  // lambda^-1 is not integrable against e^-lambda near zero
  CHECK_THROWS_AS(log_slab_integral(
                      [](double lam) { return -std::log(lam); }, 1.0, 1.0,
                      1e-10),
                  IntegrabilityError);
  // e^{+2 lambda} diverges in the tail against e^-t lambda with t = 1
  CHECK_THROWS_AS(log_slab_integral([](double lam) { return 2.0 * lam; }, 1.0,
                                    1.0, 1e-10),
                  IntegrabilityError);
}
