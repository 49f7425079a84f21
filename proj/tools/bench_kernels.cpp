// Compares the serial reference kernels against the OpenMP ones on a
// representative workload and checks that the outputs are bit-identical.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "sparse_poisson/harness.hpp"
#include "sparse_poisson/parallel.hpp"
#include "sparse_poisson/risk.hpp"

namespace sp = sparse_poisson;

namespace {

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", sp::thread_budget());

  {
    std::vector<double> grid;
    for (int i = 0; i < 96; ++i) {
      grid.push_back(1e-3 * std::pow(5e4, i / 95.0));
    }
    std::vector<double> serial_out, parallel_out;
    const double t_serial = time_ms([&] {
      serial_out = sp::rho_curve(grid, 1e-4, 0.1, 1.0, sp::TruncationPolicy(),
                                 sp::ExecMode::serial);
    });
    const double t_parallel = time_ms([&] {
      parallel_out = sp::rho_curve(grid, 1e-4, 0.1, 1.0,
                                   sp::TruncationPolicy(),
                                   sp::ExecMode::openmp);
    });
    std::printf("rho_curve (96 points): serial %.1f ms, openmp %.1f ms, "
                "speedup %.2fx, identical=%s\n",
                t_serial, t_parallel, t_serial / t_parallel,
                serial_out == parallel_out ? "yes" : "NO");
  }

  {
    sp::ScenarioSpec spec;
    spec.n = 200;
    spec.s = 5;
    spec.r = 1.0;
    spec.trials = 60;
    spec.seed = 99;
    std::vector<sp::MethodSpec> methods(2);
    methods[0].kind = sp::MethodSpec::Kind::proposed;
    methods[0].name = "proposed";
    methods[0].proposed.kappa = 0.1;
    methods[1].kind = sp::MethodSpec::Kind::l1_plugin;
    methods[1].name = "l1";

    sp::TableResult serial_res, parallel_res;
    const double t_serial = time_ms([&] {
      serial_res = sp::run_table(spec, methods, 0.9, sp::ExecMode::serial);
    });
    const double t_parallel = time_ms([&] {
      parallel_res = sp::run_table(spec, methods, 0.9, sp::ExecMode::openmp);
    });
    const bool same =
        serial_res.summaries[0].l1_mean == parallel_res.summaries[0].l1_mean &&
        serial_res.summaries[0].pll_mean == parallel_res.summaries[0].pll_mean &&
        serial_res.summaries[1].coverage_pct ==
            parallel_res.summaries[1].coverage_pct;
    std::printf("run_table (60 trials): serial %.1f ms, openmp %.1f ms, "
                "speedup %.2fx, identical=%s\n",
                t_serial, t_parallel, t_serial / t_parallel,
                same ? "yes" : "NO");
  }

  {
    std::vector<double> theta(500, 0.0);
    for (int k = 0; k < 10; ++k) theta[static_cast<std::size_t>(k) * 37] = 10.0;
    sp::AdaptiveGapReport serial_rep{}, parallel_rep{};
    const double t_serial = time_ms([&] {
      serial_rep = sp::adaptive_risk_gap(theta, 1.0, 1.0, 1.0, 4000, 7,
                                         sp::TruncationPolicy(),
                                         sp::ExecMode::serial);
    });
    const double t_parallel = time_ms([&] {
      parallel_rep = sp::adaptive_risk_gap(theta, 1.0, 1.0, 1.0, 4000, 7,
                                           sp::TruncationPolicy(),
                                           sp::ExecMode::openmp);
    });
    std::printf("adaptive_risk_gap (4000 draws): serial %.1f ms, openmp %.1f "
                "ms, speedup %.2fx, identical=%s\n",
                t_serial, t_parallel, t_serial / t_parallel,
                serial_rep.risk_adaptive_mc == parallel_rep.risk_adaptive_mc
                    ? "yes"
                    : "NO");
  }
  return 0;
}
