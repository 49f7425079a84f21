#include "sparse_poisson/parallel.hpp"

#include <cstdlib>
#include <string>

namespace sparse_poisson {

int thread_budget() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("SPARSE_POISSON_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (...) {
      // unparsable value: keep the OpenMP default
    }
  }
  return n;
}

}  // namespace sparse_poisson
