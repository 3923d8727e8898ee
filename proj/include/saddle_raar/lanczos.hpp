#pragma once

#include <cstdint>
#include <functional>

#include "saddle_raar/types.hpp"

namespace saddle_raar {

/// y = Op x for a real symmetric operator.
using SymmetricOperator = std::function<void(const RVec& x, RVec& y)>;

struct LanczosResult {
  double value = 0.0;
  RVec vector;
  /// ||Op v - value v|| for the returned unit vector.
  double residual = 0.0;
  int steps = 0;
  bool converged = false;
};

/// Extreme eigenpair of a symmetric operator by Lanczos with full
/// reorthogonalization. Iteration stops once the Ritz residual drops below
/// `tol` or after `max_steps` steps.
LanczosResult lanczos_extreme(const SymmetricOperator& op, Index dim, bool smallest, double tol, int max_steps,
                              std::uint64_t seed);

}  // namespace saddle_raar
