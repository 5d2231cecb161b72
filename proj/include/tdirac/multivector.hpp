#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <ostream>

#include "tdirac/blade.hpp"
#include "tdirac/errors.hpp"

namespace tdirac {

// An element of the 16-dimensional space of nonhomogeneous differential forms
// at a point. Coefficient i multiplies the canonical blade blade_at(i); the
// coefficient of dx^{m1}^...^dx^{mk} (m1<...<mk) is u_{m1...mk}.
template <typename Scalar>
class Multivector {
 public:
  using Coeffs = Eigen::Matrix<Scalar, kBladeCount, 1>;

  Multivector() : coeffs_(Coeffs::Zero()) {}
  explicit Multivector(const Coeffs& coeffs) : coeffs_(coeffs) {}

  static Multivector Zero() { return Multivector(); }
  static Multivector scalar(Scalar s) {
    Multivector out;
    out.coeffs_[0] = s;
    return out;
  }
  static Multivector blade(BladeIndex b, Scalar s = Scalar(1)) {
    Multivector out;
    out.coeffs_[canonical_index(b)] = s;
    return out;
  }
  // dx^{i1} ^ dx^{i2} ^ ... for an arbitrary index order (sign applied).
  static Multivector basis(std::initializer_list<int> indices) {
    std::vector<int> seq(indices);
    unsigned mask = 0;
    for (int mu : seq) mask |= 1u << mu;
    Multivector out;
    const int sign = permutation_sign(seq);
    if (sign != 0) out.coeffs_[canonical_index(mask)] = Scalar(sign);
    return out;
  }
  // Grade-1 form v_mu dx^mu.
  static Multivector vector(const Eigen::Matrix<Scalar, 4, 1>& v) {
    Multivector out;
    out.coeffs_.template segment<4>(1) = v;
    return out;
  }

  const Coeffs& coeffs() const { return coeffs_; }
  Coeffs& coeffs() { return coeffs_; }

  Scalar operator[](int canonical) const { return coeffs_[canonical]; }
  Scalar& operator[](int canonical) { return coeffs_[canonical]; }
  Scalar operator[](BladeIndex b) const { return coeffs_[canonical_index(b)]; }

  Scalar scalar_part() const { return coeffs_[0]; }
  Eigen::Matrix<Scalar, 4, 1> vector_part() const { return coeffs_.template segment<4>(1); }

  Scalar norm_inf() const { return coeffs_.cwiseAbs().maxCoeff(); }

  // True when every coefficient outside grade k is exactly zero.
  bool is_homogeneous(int k) const {
    for (int i = 0; i < kBladeCount; ++i)
      if (grade_of(i) != k && coeffs_[i] != Scalar(0)) return false;
    return true;
  }
  bool is_even() const {
    for (int i = 0; i < kBladeCount; ++i)
      if ((grade_of(i) & 1) && coeffs_[i] != Scalar(0)) return false;
    return true;
  }
  // Largest absolute coefficient outside grade k.
  Scalar leakage_outside(int k) const {
    Scalar worst(0);
    for (int i = 0; i < kBladeCount; ++i)
      if (grade_of(i) != k) worst = std::max<Scalar>(worst, std::abs(coeffs_[i]));
    return worst;
  }

  Multivector& operator+=(const Multivector& o) {
    coeffs_ += o.coeffs_;
    return *this;
  }
  Multivector& operator-=(const Multivector& o) {
    coeffs_ -= o.coeffs_;
    return *this;
  }
  Multivector& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator-(const Multivector& a) { return Multivector(Coeffs(-a.coeffs_)); }
  friend Multivector operator*(Multivector a, Scalar s) { return a *= s; }
  friend Multivector operator*(Scalar s, Multivector a) { return a *= s; }
  friend Multivector operator/(Multivector a, Scalar s) { return a *= Scalar(1) / s; }

  friend std::ostream& operator<<(std::ostream& os, const Multivector& m) {
    os << '[';
    for (int i = 0; i < kBladeCount; ++i) os << (i ? ", " : "") << m.coeffs_[i];
    return os << ']';
  }

 private:
  Coeffs coeffs_;
};

using Multivectord = Multivector<double>;

template <typename Scalar>
Scalar max_abs_diff(const Multivector<Scalar>& a, const Multivector<Scalar>& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}

}  // namespace tdirac
