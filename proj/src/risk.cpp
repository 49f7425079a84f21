#include "sparse_poisson/risk.hpp"

#include <algorithm>
#include <cmath>

#include "sparse_poisson/quadrature.hpp"
#include "sparse_poisson/rng.hpp"
#include "sparse_poisson/sparsity.hpp"

namespace sparse_poisson {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double omega_at_zero(double h, double kappa, double r) {
  const double log_g =
      std::log(h) + std::lgamma(kappa) - kappa * std::log(r);
  if (log_g > 0.0) return std::exp(-log_g - std::log1p(std::exp(-log_g)));
  return 1.0 / (1.0 + std::exp(log_g));
}

// -log q(0|0) = log(1 + h G(k)/r^k) - log(1 + h G(k)/(r+1)^k), the exact
// lambda = 0 risk
double rho_at_zero(double h, double kappa, double r) {
  const double base = std::log(h) + std::lgamma(kappa);
  const double g_r = base - kappa * std::log(r);
  const double g_r1 = base - kappa * std::log(r + 1.0);
  auto log1p_exp = [](double a) {
    return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
  };
  return log1p_exp(g_r) - log1p_exp(g_r1);
}

struct GoldenResult {
  double x;
  double fx;
};

template <class F>
GoldenResult golden_max(const F& f, double a, double b) {
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

template <class F>
SupRisk sup_over_lambda(const F& f, double lambda_lo, double lambda_hi,
                        ExecMode mode) {
  const int n_grid = 128;
  std::vector<double> grid(n_grid), vals(n_grid);
  const double llo = std::log(lambda_lo), lhi = std::log(lambda_hi);
  for (int i = 0; i < n_grid; ++i) {
    grid[i] = std::exp(llo + (lhi - llo) * i / (n_grid - 1));
  }
  parallel_for(n_grid, mode, [&](std::size_t i) { vals[i] = f(grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] > vals[best]) best = i;
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min<std::size_t>(n_grid - 1, best + 1)];
  const GoldenResult g = golden_max(f, a, b);
  if (g.fx >= vals[best]) return {g.fx, g.x};
  return {vals[best], grid[best]};
}

}  // namespace

TruncationPolicy::TruncationPolicy() {
  // Chernoff check of the cutoff rule: P(X > k) <= exp(-mu) (e mu / k)^k
  for (double mu = 0.01; mu <= 1e4; mu *= 2.0) {
    const double k = static_cast<double>(x_max(mu)) + 1.0;
    const double log_tail = -mu + k + k * std::log(mu / k);
    if (log_tail > std::log(tail_mass_bound)) {
      throw std::logic_error("TruncationPolicy: cutoff rule too tight");
    }
  }
}

double log_poisson_pmf(long long y, double lambda) {
  if (lambda == 0.0) return y == 0 ? 0.0 : -kInf;
  return -lambda + static_cast<double>(y) * std::log(lambda) -
         std::lgamma(static_cast<double>(y) + 1.0);
}

double kl_poisson_vs_zinb(double lambda, double omega, double m, double r,
                          const TruncationPolicy& policy) {
  const double log_r = std::log(r), log_r1 = std::log(r + 1.0);
  const double log_nb0 = m * (log_r - log_r1);
  auto log_mix = [&](long long y, double log_nb) {
    if (omega <= 0.0) return log_nb;
    if (y == 0) return std::log(omega + (1.0 - omega) * std::exp(log_nb));
    return std::log1p(-omega) + log_nb;
  };
  if (lambda == 0.0) return -log_mix(0, log_nb0);

  const long long cap = policy.y_max(lambda);
  const double log_lam = std::log(lambda);
  double total = 0.0;
  double log_po = -lambda;   // log Po(0; lambda)
  double log_nb = log_nb0;   // log NB(y) via recurrence
  for (long long y = 0; y <= cap; ++y) {
    if (y > 0) {
      const double yd = static_cast<double>(y);
      log_po += log_lam - std::log(yd);
      log_nb += std::log(m + yd - 1.0) - std::log(yd) - log_r1;
    }
    const double po = std::exp(log_po);
    if (po > 0.0) total += po * (log_po - log_mix(y, log_nb));
  }
  return total;
}

double coord_risk_rho(double lambda, double h, double kappa, double r,
                      const TruncationPolicy& policy) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("coord_risk_rho: lambda must be >= 0");
  }
  if (lambda == 0.0) return rho_at_zero(h, kappa, r);
  const double om0 = omega_at_zero(h, kappa, r);
  const double mu = r * lambda;
  const long long cap = policy.x_max(mu);
  double total = 0.0;
  for (long long x = 0; x <= cap; ++x) {
    const double px = std::exp(log_poisson_pmf(x, mu));
    if (px == 0.0) continue;
    const double omega = (x == 0) ? om0 : 0.0;
    total += px * kl_poisson_vs_zinb(lambda, omega,
                                     static_cast<double>(x) + kappa, r,
                                     policy);
  }
  return total;
}

double coord_estimation_rho(double lambda, double h, double kappa, double r,
                            const TruncationPolicy& policy) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("coord_estimation_rho: lambda must be >= 0");
  }
  if (lambda == 0.0) return posterior_mean_coord(0, h, kappa, r);
  const double mu = r * lambda;
  const long long cap = policy.x_max(mu);
  double total = 0.0;
  for (long long x = 0; x <= cap; ++x) {
    const double px = std::exp(log_poisson_pmf(x, mu));
    if (px == 0.0) continue;
    const double th = posterior_mean_coord(x, h, kappa, r);
    total += px * (lambda * std::log(lambda / th) - lambda + th);
  }
  return total;
}

std::vector<double> rho_curve(const std::vector<double>& lambdas, double h,
                              double kappa, double r,
                              const TruncationPolicy& policy, ExecMode mode) {
  std::vector<double> out(lambdas.size());
  parallel_for(lambdas.size(), mode, [&](std::size_t i) {
    out[i] = coord_risk_rho(lambdas[i], h, kappa, r, policy);
  });
  return out;
}

SupRisk sup_risk(double h, double kappa, double r,
                 const TruncationPolicy& policy, double lambda_lo,
                 double lambda_hi, ExecMode mode) {
  return sup_over_lambda(
      [&](double lam) { return coord_risk_rho(lam, h, kappa, r, policy); },
      lambda_lo, lambda_hi, mode);
}

SupRisk sup_estimation_risk(double h, double kappa, double r,
                            const TruncationPolicy& policy, double lambda_lo,
                            double lambda_hi, ExecMode mode) {
  return sup_over_lambda(
      [&](double lam) {
        return coord_estimation_rho(lam, h, kappa, r, policy);
      },
      lambda_lo, lambda_hi, mode);
}

double risk_exact(const std::vector<double>& theta,
                  const SpikeSlabPrior& prior, const SamplingRatios& ratios,
                  const TruncationPolicy& policy) {
  const PowerSlab& slab = prior.power_slab();
  ratios.check_length(theta.size());
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    total += coord_risk_rho(theta[i], prior.scale_h, slab.kappa,
                            ratios.at(i), policy);
  }
  return total;
}

double estimation_risk(
    const std::vector<double>& theta,
    const std::function<double(std::size_t, long long)>& estimator,
    const SamplingRatios& ratios, const TruncationPolicy& policy) {
  ratios.check_length(theta.size());
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double lam = theta[i];
    if (!(lam >= 0.0) || !std::isfinite(lam)) {
      throw std::invalid_argument("estimation_risk: invalid theta");
    }
    if (lam == 0.0) {
      // X_i = 0 almost surely; only E[th_i] remains
      total += estimator(i, 0);
      continue;
    }
    const double mu = ratios.at(i) * lam;
    const long long cap = policy.x_max(mu);
    for (long long x = 0; x <= cap; ++x) {
      const double px = std::exp(log_poisson_pmf(x, mu));
      if (px == 0.0) continue;
      const double th = estimator(i, x);
      if (!(th > 0.0)) return kInf;
      total += px * (lam * std::log(lam / th) - lam + th);
    }
  }
  return total;
}

double risk_via_integral_identity(const std::vector<double>& theta,
                       const SpikeSlabPrior& prior, double r, int quad_nodes,
                       const TruncationPolicy& policy) {
  const PowerSlab& slab = prior.power_slab();
  if (!(r > 0.0)) throw std::invalid_argument("risk_via_integral_identity: r must be > 0");
  const auto nodes = gauss_legendre(quad_nodes);
  double total = 0.0;
  for (const auto& [xi, wi] : nodes) {
    const double t = r + 0.5 * (xi + 1.0);  // map [-1,1] to (r, r+1)
    const double w = 0.5 * wi;
    // R_e(t theta, t th(.;t)) with the scaled data Z ~ Po(t theta_i)
    std::vector<double> scaled(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) scaled[i] = t * theta[i];
    const double re = estimation_risk(
        scaled,
        [&](std::size_t, long long x) {
          return t * posterior_mean_coord(x, prior.scale_h, slab.kappa, t);
        },
        SamplingRatios::scalar(1.0), policy);
    total += w * re / t;
  }
  return total;
}

BlockLowerBound lower_bound_block_prior(long long n, long long s, double r) {
  if (!(s > 0) || !(s < n)) {
    throw std::invalid_argument("lower_bound_block_prior: need 0 < s < n");
  }
  const double m = std::floor(static_cast<double>(n) / static_cast<double>(s));
  const double nu_star = std::log((r + 1.0) / r);
  return {nu_star, constant_c(r) * static_cast<double>(s) * std::log(m)};
}

AdaptiveGapReport adaptive_risk_gap(const std::vector<double>& theta,
                                    double kappa, double scale_l, double r,
                                    long long n_mc, std::uint64_t seed,
                                    const TruncationPolicy& policy,
                                    ExecMode mode) {
  if (n_mc < 1) throw std::invalid_argument("adaptive_risk_gap: n_mc >= 1");
  const std::size_t n = theta.size();
  long long s = 0;
  for (double v : theta) {
    if (v > 0.0) ++s;
  }
  if (s == 0 || s >= static_cast<long long>(n)) {
    throw std::invalid_argument("adaptive_risk_gap: need 0 < ||theta||_0 < n");
  }
  const double eta = static_cast<double>(s) / static_cast<double>(n);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (theta[i] > 0.0) active.push_back(i);
  }
  const std::size_t n_zero = n - active.size();

  std::vector<double> losses(static_cast<std::size_t>(n_mc));
  parallel_for(static_cast<std::size_t>(n_mc), mode, [&](std::size_t j) {
    // draw X over the active coordinates; zero coordinates give X = 0
    std::vector<long long> x_active(active.size());
    long long nonzero = 0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      CounterRng rng(seed, j, active[a]);
      x_active[a] = rpois(rng, r * theta[active[a]]);
      if (x_active[a] >= 1) ++nonzero;
    }
    const long long s_hat = std::max<long long>(1, nonzero);
    const double h =
        scale_l * static_cast<double>(s_hat) / static_cast<double>(n);
    double loss = static_cast<double>(n_zero) * rho_at_zero(h, kappa, r);
    const double om0 = omega_at_zero(h, kappa, r);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double omega = (x_active[a] == 0) ? om0 : 0.0;
      loss += kl_poisson_vs_zinb(theta[active[a]], omega,
                                 static_cast<double>(x_active[a]) + kappa, r,
                                 policy);
    }
    losses[j] = loss;
  });
  double mc = 0.0;
  for (double v : losses) mc += v;
  mc /= static_cast<double>(n_mc);

  const double oracle =
      risk_exact(theta, SpikeSlabPrior::power(scale_l * eta, kappa),
                 SamplingRatios::scalar(r), policy);
  const double scale = constant_c(r) * static_cast<double>(s) *
                       std::log(static_cast<double>(n) / static_cast<double>(s));
  return {mc, oracle, std::fabs(mc - oracle) / scale};
}

RiskReport make_risk_report(double eta, double kappa, double r,
                            const std::vector<double>& lambda_grid,
                            const TruncationPolicy& policy, ExecMode mode) {
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw std::invalid_argument("make_risk_report: eta must be in (0,1)");
  }
  RiskReport rep;
  rep.lambda_grid = lambda_grid;
  rep.rho_values = rho_curve(lambda_grid, eta, kappa, r, policy, mode);
  rep.rho_at_zero = rho_at_zero(eta, kappa, r);
  const SupRisk sup = sup_risk(eta, kappa, r, policy, 1e-4, 50.0, mode);
  rep.sup_rho = sup.sup_rho;
  rep.argmax_lambda = sup.argmax_lambda;
  const double m = std::floor(1.0 / eta);
  rep.lower_bound = constant_c(r) * std::log(std::max(1.0, m));
  rep.constant_ratio = rep.sup_rho / (constant_c(r) * std::log(1.0 / eta));
  return rep;
}

}  // namespace sparse_poisson
