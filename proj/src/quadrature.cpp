#include "sparse_poisson/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparse_poisson {

namespace {

// QUADPACK Gauss-Kronrod 7/15 constants (positive half, symmetric).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct PanelResult {
  double value;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = half * kXgk[j];
    const double fsum = f(center - x) + f(center + x);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kron *= half;
  gauss *= half;
  return {kron, std::fabs(kron - gauss)};
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, int initial_panels,
                          int max_panels) {
  if (!(b > a)) return 0.0;
  if (initial_panels < 1) initial_panels = 1;

  struct Panel {
    double a, b, value, error;
  };
  std::vector<Panel> panels;
  panels.reserve(static_cast<std::size_t>(initial_panels) + 64);
  for (int i = 0; i < initial_panels; ++i) {
    const double pa = a + (b - a) * i / initial_panels;
    const double pb = a + (b - a) * (i + 1) / initial_panels;
    const PanelResult r = gk15(f, pa, pb);
    panels.push_back({pa, pb, r.value, r.error});
  }

  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const double target =
        rel_tol * std::max(std::fabs(total), 1e-300) + 1e-300;
    if (err <= target) return total;
    if (panels.size() >= static_cast<std::size_t>(max_panels)) {
      throw QuadratureError("adaptive_integrate: panel budget exhausted");
    }
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      throw QuadratureError("adaptive_integrate: interval underflow");
    }
    const PanelResult left = gk15(f, p.a, mid);
    const PanelResult right = gk15(f, mid, p.b);
    panels[worst] = {p.a, mid, left.value, left.error};
    panels.push_back({mid, p.b, right.value, right.error});
  }
}

double log_slab_integral(const std::function<double(double)>& log_gamma,
                         double s, double t, double rel_tol) {
  if (!(s >= 1.0) || !(t > 0.0)) {
    throw std::invalid_argument("log_slab_integral: need s >= 1 and t > 0");
  }
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const double w0 = 400.0;  // lower piece covers lambda in [e^-400, 1]

  // Integrand in w = log lambda on [-w0, 0]: lambda^(s-1) dlambda = e^(s w) dw
  auto log_f_low = [&](double w) {
    const double lam = std::exp(w);
    const double lg = log_gamma(lam);
    if (!std::isfinite(lg) && lg < 0.0) return neg_inf;
    return s * w - t * lam + lg;
  };
  // Tail in u on (0,1): lambda = 1 + u/(1-u), dlambda = du/(1-u)^2
  auto log_f_tail = [&](double u) {
    const double one_m = 1.0 - u;
    const double lam = 1.0 + u / one_m;
    const double lg = log_gamma(lam);
    if (!std::isfinite(lg) && lg < 0.0) return neg_inf;
    return (s - 1.0) * std::log(lam) - t * lam + lg - 2.0 * std::log(one_m);
  };

  double peak = neg_inf;
  const int probes = 256;
  for (int i = 0; i <= probes; ++i) {
    const double w = -w0 + w0 * i / probes;
    peak = std::max(peak, log_f_low(w));
  }
  for (int i = 1; i < probes; ++i) {
    const double u = static_cast<double>(i) / probes;
    peak = std::max(peak, log_f_tail(u));
  }
  if (!std::isfinite(peak)) {
    throw IntegrabilityError("log_slab_integral: integrand vanished");
  }
  // The mass near lambda = 0 must decay, otherwise the slab is not
  // integrable against lambda^(s-1) e^(-t lambda).
  if (log_f_low(-w0) > peak - 34.0) {
    throw IntegrabilityError(
        "log_slab_integral: no decay toward lambda = 0; slab integrability "
        "condition fails");
  }
  if (log_f_tail(1.0 - 1e-9) > peak - 34.0) {
    throw IntegrabilityError(
        "log_slab_integral: no decay in the tail; slab integrability "
        "condition fails");
  }

  auto scaled_low = [&](double w) {
    const double v = log_f_low(w) - peak;
    return v < -745.0 ? 0.0 : std::exp(v);
  };
  auto scaled_tail = [&](double u) {
    const double v = log_f_tail(u) - peak;
    return v < -745.0 ? 0.0 : std::exp(v);
  };

  const double low = adaptive_integrate(scaled_low, -w0, 0.0, rel_tol, 40);
  const double tail =
      adaptive_integrate(scaled_tail, 1e-12, 1.0 - 1e-12, rel_tol, 30);
  const double total = low + tail;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw IntegrabilityError("log_slab_integral: quadrature failed");
  }
  return peak + std::log(total);
}

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<std::pair<double, double>> out(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out[i] = {-x, w};
    out[n - 1 - i] = {x, w};
  }
  return out;
}

}  // namespace sparse_poisson
