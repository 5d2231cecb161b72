#pragma once

#include <gtest/gtest.h>

#include <initializer_list>
#include <vector>

#include "tdirac/multivector.hpp"

namespace tdirac::testing {

inline Multivectord mv(std::initializer_list<double> c) {
  Multivectord out;
  int i = 0;
  for (double v : c) out[i++] = v;
  return out;
}

inline ::testing::AssertionResult mv_near(const Multivectord& a, const Multivectord& b, double tol) {
  const double d = max_abs_diff(a, b);
  if (d <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max |a - b| = " << d << " > " << tol << "\n  a = " << a << "\n  b = " << b;
}

inline Eigen::Matrix4d minkowski_g() { return Eigen::Vector4d(1, -1, -1, -1).asDiagonal(); }

}  // namespace tdirac::testing

#define EXPECT_MV_NEAR(a, b, tol) EXPECT_TRUE(::tdirac::testing::mv_near((a), (b), (tol)))
