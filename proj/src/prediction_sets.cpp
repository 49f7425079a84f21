#include "sparse_poisson/prediction_sets.hpp"

namespace sparse_poisson {

bool contains(const JointPredictionSet& set, const CountVector& y) {
  if (y.size() != set.lo.size()) {
    throw std::invalid_argument("contains: length mismatch");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < set.lo[i] || y[i] > set.hi[i]) return false;
  }
  return true;
}

}  // namespace sparse_poisson
