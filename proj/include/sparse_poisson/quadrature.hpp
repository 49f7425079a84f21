#ifndef SPARSE_POISSON_QUADRATURE_HPP
#define SPARSE_POISSON_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sparse_poisson {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a slab integral fails to converge, i.e. the posterior
// integrability condition does not hold numerically.
struct IntegrabilityError : QuadratureError {
  using QuadratureError::QuadratureError;
};

// Adaptive Gauss-Kronrod 7/15 over [a, b]. The interval is pre-split into
// initial_panels so a single panel cannot silently miss a narrow peak.
double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, int initial_panels = 1,
                          int max_panels = 4000);

// log of I_gamma(s;t) = int_0^inf lambda^(s-1) exp(-t lambda) gamma(lambda)
// dlambda, computed from log gamma with peak rescaling so large s do not
// overflow. Domain split at lambda = 1; the lower piece runs in w = log
// lambda, the tail uses lambda = 1 + u/(1-u).
double log_slab_integral(const std::function<double(double)>& log_gamma,
                         double s, double t, double rel_tol);

// Nodes and weights on [-1, 1].
std::vector<std::pair<double, double>> gauss_legendre(int n);

}  // namespace sparse_poisson

#endif
