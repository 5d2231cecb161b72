#pragma once

#include <algorithm>
#include <cmath>

namespace tdirac {

// Tolerance tiers. `scale` is the sup-norm of the operands being compared.
//   algebraic:  1e-11 * max(1, scale)
//   fd:         max(50 h^2, 1e-9) * (1 + scale)        single central difference
//   nested_fd:  2 * fd                                  one difference of a difference
struct TolerancePolicy {
  double h = 1e-3;
  double algebraic_rel = 1e-11;

  double algebraic(double scale = 0.0) const { return algebraic_rel * std::max(1.0, scale); }
  double fd(double scale = 0.0) const { return std::max(50.0 * h * h, 1e-9) * (1.0 + scale); }
  double nested_fd(double scale = 0.0) const { return 2.0 * fd(scale); }
};

}  // namespace tdirac
