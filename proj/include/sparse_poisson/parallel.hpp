#ifndef SPARSE_POISSON_PARALLEL_HPP
#define SPARSE_POISSON_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sparse_poisson {

// Serial mode is the reference path; the OpenMP kernels must produce
// bit-identical results because loop bodies only write their own slot and
// reductions run in fixed index order afterwards.
enum class ExecMode { serial, openmp };

// Thread budget: min(omp_get_max_threads(), SPARSE_POISSON_THREADS if set).
int thread_budget();

template <class Body>
void parallel_for(std::size_t count, ExecMode mode, Body&& body) {
  if (mode == ExecMode::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  const int threads = thread_budget();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    body(static_cast<std::size_t>(i));
  }
#else
  for (std::size_t i = 0; i < count; ++i) body(i);
#endif
}

}  // namespace sparse_poisson

#endif
