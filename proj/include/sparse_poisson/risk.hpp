#ifndef SPARSE_POISSON_RISK_HPP
#define SPARSE_POISSON_RISK_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sparse_poisson/model.hpp"
#include "sparse_poisson/parallel.hpp"
#include "sparse_poisson/predictive.hpp"

namespace sparse_poisson {

// Truncation cutoffs for the otherwise infinite Poisson sums. The default
// ceil(mu + 12 sqrt(mu+1) + 40) keeps the tail mass below 1e-12 for mu up
// to 1e4 (Chernoff-checked at construction).
struct TruncationPolicy {
  double tail_mass_bound = 1e-12;

  TruncationPolicy();
  long long x_max(double mu) const {
    return static_cast<long long>(
        std::ceil(mu + 12.0 * std::sqrt(mu + 1.0) + 40.0));
  }
  long long y_max(double lambda) const { return x_max(lambda); }
};

double log_poisson_pmf(long long y, double lambda);

// KL( Po(lambda) || coordinate ZINB(omega, size m, ratio r) ), summed to
// y_max(lambda).
double kl_poisson_vs_zinb(double lambda, double omega, double m, double r,
                          const TruncationPolicy& policy);

// Sum over coordinates of KL( Po(theta_i) || density coordinate i ).
// Returns +inf when the density puts zero mass where Po(theta_i) does not
// (degenerate plug-in densities).
template <class Density>
double kl_loss(const std::vector<double>& theta, const Density& density,
               const TruncationPolicy& policy = TruncationPolicy()) {
  if (theta.size() != density.size()) {
    throw std::invalid_argument("kl_loss: length mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double lam = theta[i];
    if (!(lam >= 0.0) || !std::isfinite(lam)) {
      throw std::invalid_argument("kl_loss: theta must be finite, >= 0");
    }
    if (lam == 0.0) {
      const double lp = density.coord_log_pmf(i, 0);
      if (lp == -std::numeric_limits<double>::infinity()) {
        return std::numeric_limits<double>::infinity();
      }
      total -= lp;
      continue;
    }
    const long long cap = policy.y_max(lam);
    for (long long y = 0; y <= cap; ++y) {
      const double lpo = log_poisson_pmf(y, lam);
      const double po = std::exp(lpo);
      if (po == 0.0) continue;
      const double lq = density.coord_log_pmf(i, y);
      if (lq == -std::numeric_limits<double>::infinity()) {
        return std::numeric_limits<double>::infinity();
      }
      total += po * (lpo - lq);
    }
  }
  return total;
}

// Coordinate-wise KL risk rho(lambda) of the power-slab predictive at
// sampling ratio r: E over X ~ Po(r lambda) of the KL between Po(lambda)
// and the predictive fitted at X. rho(0) = -log q(0|0).
double coord_risk_rho(double lambda, double h, double kappa, double r,
                      const TruncationPolicy& policy = TruncationPolicy());

// Estimation counterpart: E_{X ~ Po(r lambda)}[lambda log(lambda/th(X)) -
// lambda + th(X)] with the closed-form posterior mean at t = r.
double coord_estimation_rho(double lambda, double h, double kappa, double r,
                            const TruncationPolicy& policy =
                                TruncationPolicy());

std::vector<double> rho_curve(const std::vector<double>& lambdas, double h,
                              double kappa, double r,
                              const TruncationPolicy& policy =
                                  TruncationPolicy(),
                              ExecMode mode = ExecMode::openmp);

struct SupRisk {
  double sup_rho;
  double argmax_lambda;
};

// Coarse log-grid scan over [lambda_lo, lambda_hi] followed by golden
// section refinement.
SupRisk sup_risk(double h, double kappa, double r,
                 const TruncationPolicy& policy = TruncationPolicy(),
                 double lambda_lo = 1e-4, double lambda_hi = 50.0,
                 ExecMode mode = ExecMode::openmp);
SupRisk sup_estimation_risk(double h, double kappa, double r,
                            const TruncationPolicy& policy =
                                TruncationPolicy(),
                            double lambda_lo = 1e-4, double lambda_hi = 50.0,
                            ExecMode mode = ExecMode::openmp);

// Exact (truncated) KL risk of the power-slab predictive at theta.
double risk_exact(const std::vector<double>& theta,
                  const SpikeSlabPrior& prior, const SamplingRatios& ratios,
                  const TruncationPolicy& policy = TruncationPolicy());

// Sum_i E_{X_i ~ Po(r_i theta_i)}[theta_i log(theta_i/th_i(X_i)) - theta_i
// + th_i(X_i)] for a strictly positive estimator th_i(x).
double estimation_risk(
    const std::vector<double>& theta,
    const std::function<double(std::size_t, long long)>& estimator,
    const SamplingRatios& ratios,
    const TruncationPolicy& policy = TruncationPolicy());

// Gauss-Legendre evaluation of the risk integral identity
// R(theta, q_Pi) = int_r^{r+1} R_e(t theta, t th_Pi(.;t)) / t dt,
// an independent route to risk_exact.
double risk_via_integral_identity(const std::vector<double>& theta,
                       const SpikeSlabPrior& prior, double r,
                       int quad_nodes = 32,
                       const TruncationPolicy& policy = TruncationPolicy());

struct BlockLowerBound {
  double nu_star;  // log((r+1)/r)
  double bound;    // constant_c(r) * s * log(floor(n/s))
};

BlockLowerBound lower_bound_block_prior(long long n, long long s, double r);

struct AdaptiveGapReport {
  double risk_adaptive_mc;
  double risk_oracle_exact;
  double gap_ratio;  // |difference| / (C(r) s log(n/s))
};

// Monte Carlo risk of the sparsity-adaptive predictive (h = L shat/n per
// draw) against the exact risk of the oracle prior (h = L s/n), with exact
// inner sums over Y.
AdaptiveGapReport adaptive_risk_gap(const std::vector<double>& theta,
                                    double kappa, double scale_l, double r,
                                    long long n_mc, std::uint64_t seed,
                                    const TruncationPolicy& policy =
                                        TruncationPolicy(),
                                    ExecMode mode = ExecMode::openmp);

struct RiskReport {
  std::vector<double> lambda_grid;
  std::vector<double> rho_values;
  double rho_at_zero;
  double sup_rho;
  double argmax_lambda;
  double lower_bound;
  double constant_ratio;  // sup_rho / (c log(1/eta))
};

RiskReport make_risk_report(double eta, double kappa, double r,
                            const std::vector<double>& lambda_grid,
                            const TruncationPolicy& policy =
                                TruncationPolicy(),
                            ExecMode mode = ExecMode::openmp);

}  // namespace sparse_poisson

#endif
