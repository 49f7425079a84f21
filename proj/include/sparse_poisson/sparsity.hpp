#ifndef SPARSE_POISSON_SPARSITY_HPP
#define SPARSE_POISSON_SPARSITY_HPP

#include <vector>

#include "sparse_poisson/model.hpp"

namespace sparse_poisson {

struct SparsityEstimate {
  enum class Method { count_nonzero, two_cluster, per_period_mean };
  long long s_hat;  // >= 1 always
  double eta_hat;   // s_hat / n
  Method method;
};

// max(1, #{i : x_i >= 1})
SparsityEstimate estimate_sparsity(const CountVector& x);

// Exact two-means split over the sorted counts; the upper cluster size is
// s_hat. Constant vectors fall back to the nonzero count.
SparsityEstimate estimate_sparsity_two_cluster(const CountVector& x);

// max(1, round(mean over periods of #{i : x_i > 1})), round half up.
// Note the strict "> 1", unlike the main estimator's ">= 1".
SparsityEstimate estimate_sparsity_per_period(
    const std::vector<CountVector>& periods);

}  // namespace sparse_poisson

#endif
