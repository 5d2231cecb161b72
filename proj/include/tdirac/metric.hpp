#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>

#include "tdirac/blade.hpp"
#include "tdirac/errors.hpp"

namespace tdirac {

template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

using Point = Eigen::Vector4d;

// Covariant metric at one chart point together with everything derived from
// it: inverse, determinant, sqrt(-g) and the matrix of the Hodge star on the
// 16 canonical coefficients. Construction validates det < 0 and signature -2.
template <typename Scalar>
class MetricAtPoint {
 public:
  using StarMatrix = Eigen::Matrix<Scalar, kBladeCount, kBladeCount>;

  explicit MetricAtPoint(const Matrix4<Scalar>& g) : g_(Scalar(0.5) * (g + g.transpose())) {
    det_ = g_.determinant();
    if (!(det_ < Scalar(0))) {
      std::ostringstream os;
      os << "metric determinant " << det_ << " is not negative";
      throw MetricAxiomViolation(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix4<Scalar>> eig(g_, Eigen::EigenvaluesOnly);
    int positive = 0;
    int negative = 0;
    for (int i = 0; i < 4; ++i) {
      if (eig.eigenvalues()[i] > Scalar(0)) ++positive;
      if (eig.eigenvalues()[i] < Scalar(0)) ++negative;
    }
    if (positive != 1 || negative != 3)
      throw MetricAxiomViolation("metric signature is not -2 (need one positive, three negative eigenvalues)");
    ginv_ = g_.inverse();
    ginv_ = Scalar(0.5) * (ginv_ + ginv_.transpose());
    sqrt_neg_det_ = std::sqrt(-det_);
    build_star();
  }

  static MetricAtPoint minkowski() {
    return MetricAtPoint(Vector4<Scalar>(1, -1, -1, -1).asDiagonal().toDenseMatrix());
  }

  const Matrix4<Scalar>& g() const { return g_; }
  const Matrix4<Scalar>& ginv() const { return ginv_; }
  Scalar det() const { return det_; }
  Scalar sqrt_neg_det() const { return sqrt_neg_det_; }
  const StarMatrix& star() const { return star_; }

  // Entry (A,B) of the k-th compound of ginv: det(ginv[rows A, cols B]). This
  // raises all indices of a k-form component: u^A = sum_B raise(A,B) u_B.
  Scalar raise(BladeIndex a, BladeIndex b) const {
    const int k = a.grade();
    if (k != b.grade()) return Scalar(0);
    if (k == 0) return Scalar(1);
    const auto ia = indices_of(a);
    const auto ib = indices_of(b);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sub(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub(r, c) = ginv_(ia[r], ib[c]);
    return sub.determinant();
  }

 private:
  void build_star() {
    star_.setZero();
    for (int ia = 0; ia < kBladeCount; ++ia) {
      const BladeIndex a = blade_at(ia);
      const BladeIndex comp{static_cast<std::uint8_t>(0xFu ^ a.mask)};
      const Scalar eps = Scalar(levi_civita_split(a.mask));
      const int row = canonical_index(comp);
      for (int ib = grade_begin(a.grade()); ib < grade_end(a.grade()); ++ib)
        star_(row, ib) = sqrt_neg_det_ * eps * raise(a, blade_at(ib));
    }
  }

  Matrix4<Scalar> g_;
  Matrix4<Scalar> ginv_;
  Scalar det_{};
  Scalar sqrt_neg_det_{};
  StarMatrix star_;
};

using MetricAtPointd = MetricAtPoint<double>;

}  // namespace tdirac
