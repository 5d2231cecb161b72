#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "tdirac/blade.hpp"
#include "tdirac/metric.hpp"
#include "tdirac/multivector.hpp"

// Pointwise algebra of differential forms on a 4D pseudo-Riemannian chart:
// exterior product, Hodge star, Com, the grade-table Clifford product and the
// operations built on it. Every function is pure.

namespace tdirac {

namespace detail {

struct WedgeEntry {
  std::int8_t target;  // canonical index of the product blade, -1 if zero
  std::int8_t sign;
};

constexpr std::array<std::array<WedgeEntry, kBladeCount>, kBladeCount> make_wedge_table() {
  std::array<std::array<WedgeEntry, kBladeCount>, kBladeCount> t{};
  for (int i = 0; i < kBladeCount; ++i)
    for (int j = 0; j < kBladeCount; ++j) {
      const unsigned a = kCanonicalMasks[i];
      const unsigned b = kCanonicalMasks[j];
      const int s = wedge_sign(a, b);
      t[i][j] = s == 0 ? WedgeEntry{-1, 0}
                       : WedgeEntry{static_cast<std::int8_t>(kMaskToIndex[a | b]),
                                    static_cast<std::int8_t>(s)};
    }
  return t;
}

inline constexpr auto kWedgeTable = make_wedge_table();

}  // namespace detail

template <typename Scalar>
Multivector<Scalar> grade_project(const Multivector<Scalar>& u, int k) {
  if (k < 0 || k > kDim) throw GradeError("grade_project: grade out of range 0..4");
  Multivector<Scalar> out;
  for (int i = grade_begin(k); i < grade_end(k); ++i) out[i] = u[i];
  return out;
}

template <typename Scalar>
Multivector<Scalar> even_part(const Multivector<Scalar>& u) {
  return grade_project(u, 0) + grade_project(u, 2) + grade_project(u, 4);
}

template <typename Scalar>
Multivector<Scalar> wedge(const Multivector<Scalar>& u, const Multivector<Scalar>& v) {
  Multivector<Scalar> out;
  for (int i = 0; i < kBladeCount; ++i) {
    if (u[i] == Scalar(0)) continue;
    for (int j = 0; j < kBladeCount; ++j) {
      const auto& e = detail::kWedgeTable[i][j];
      if (e.target < 0 || v[j] == Scalar(0)) continue;
      out[e.target] += Scalar(e.sign) * u[i] * v[j];
    }
  }
  return out;
}

template <typename Scalar>
Multivector<Scalar> hodge_star(const Multivector<Scalar>& u, const MetricAtPoint<Scalar>& m) {
  return Multivector<Scalar>(typename Multivector<Scalar>::Coeffs(m.star() * u.coeffs()));
}

namespace detail {

template <typename Scalar>
Matrix4<Scalar> antisymmetric_components(const Multivector<Scalar>& u) {
  Matrix4<Scalar> a = Matrix4<Scalar>::Zero();
  for (int i = grade_begin(2); i < grade_end(2); ++i) {
    const auto idx = indices_of(blade_at(i));
    a(idx[0], idx[1]) = u[i];
    a(idx[1], idx[0]) = -u[i];
  }
  return a;
}

// sum_{ij} t_ij dx^i ^ dx^j as a 2-form.
template <typename Scalar>
Multivector<Scalar> two_form_from_matrix(const Matrix4<Scalar>& t) {
  Multivector<Scalar> out;
  for (int i = grade_begin(2); i < grade_end(2); ++i) {
    const auto idx = indices_of(blade_at(i));
    out[i] = t(idx[0], idx[1]) - t(idx[1], idx[0]);
  }
  return out;
}

}  // namespace detail

// Com(1/2 a dx^dx, 1/2 b dx^dx) = 1/2 a_{m1m2} b_{n1n2} ( -g^{m1n1} dx^{m2}^dx^{n2}
//   - g^{m2n2} dx^{m1}^dx^{n1} + g^{m1n2} dx^{m2}^dx^{n1} + g^{m2n1} dx^{m1}^dx^{n2} ).
// Each of the four terms is a matrix product of the component arrays.
template <typename Scalar>
Multivector<Scalar> com(const Multivector<Scalar>& u, const Multivector<Scalar>& v,
                        const MetricAtPoint<Scalar>& m) {
  if (!u.is_homogeneous(2) || !v.is_homogeneous(2)) throw GradeError("Com requires two pure 2-forms");
  const Matrix4<Scalar> a = detail::antisymmetric_components(u);
  const Matrix4<Scalar> b = detail::antisymmetric_components(v);
  const Matrix4<Scalar>& gi = m.ginv();
  const Matrix4<Scalar> t = Scalar(0.5) * (-(a.transpose() * gi * b)        // -g^{m1n1}: (m2,n2)
                                           - (a * gi * b.transpose())        // -g^{m2n2}: (m1,n1)
                                           + (a.transpose() * gi * b.transpose())  // +g^{m1n2}: (m2,n1)
                                           + (a * gi * b));                  // +g^{m2n1}: (m1,n2)
  return detail::two_form_from_matrix(t);
}

namespace detail {

// One grade-pair kernel of the Clifford product; ur in grade r, vs in grade s.
template <typename Scalar>
Multivector<Scalar> grade_pair_product(int r, int s, const Multivector<Scalar>& ur,
                                       const Multivector<Scalar>& vs, const MetricAtPoint<Scalar>& m) {
  auto star = [&m](const Multivector<Scalar>& x) { return hodge_star(x, m); };
  if (r == 0 || s == 0) return wedge(ur, vs);
  if (r == 1) return wedge(ur, vs) - star(wedge(ur, star(vs)));
  // k x 1 for k >= 2. The form is U^V + *(*U ^ V); see README "Product table".
  if (s == 1) return wedge(ur, vs) + star(wedge(star(ur), vs));
  switch (r * 10 + s) {
    case 22: return wedge(ur, vs) + star(wedge(ur, star(vs))) + Scalar(0.5) * com(ur, vs, m);
    case 23: return wedge(star(ur), star(vs)) - star(wedge(ur, star(vs)));
    case 24: return wedge(star(ur), star(vs));
    case 32: return -wedge(star(ur), star(vs)) - star(wedge(star(ur), vs));
    case 33: return wedge(star(ur), star(vs)) + star(wedge(ur, star(vs)));
    case 34: return wedge(star(ur), star(vs));
    case 42: return wedge(star(ur), star(vs));
    case 43: return -wedge(star(ur), star(vs));
    case 44: return -wedge(star(ur), star(vs));
    default: break;
  }
  return Multivector<Scalar>();
}

}  // namespace detail

// Clifford product of differential forms, the bilinear extension of the
// grade-pair table.
template <typename Scalar>
Multivector<Scalar> clifford_mul(const Multivector<Scalar>& u, const Multivector<Scalar>& v,
                                 const MetricAtPoint<Scalar>& m) {
  std::array<Multivector<Scalar>, 5> ug;
  std::array<Multivector<Scalar>, 5> vg;
  std::array<bool, 5> uz{};
  std::array<bool, 5> vz{};
  for (int k = 0; k <= kDim; ++k) {
    ug[k] = grade_project(u, k);
    vg[k] = grade_project(v, k);
    uz[k] = ug[k].coeffs().isZero(0);
    vz[k] = vg[k].coeffs().isZero(0);
  }
  Multivector<Scalar> out;
  for (int r = 0; r <= kDim; ++r) {
    if (uz[r]) continue;
    for (int s = 0; s <= kDim; ++s) {
      if (vz[s]) continue;
      out += detail::grade_pair_product(r, s, ug[r], vg[s], m);
    }
  }
  return out;
}

namespace detail {

// blade(mask) times dx^v from the right: X^dx^v + X _| dx^v, where the right
// contraction of x1^...^xk with dx^v is sum_p (-1)^{k-1-p} g^{x_p v} (X without x_p).
template <typename Scalar>
Multivector<Scalar> absorb_covector_right(const Multivector<Scalar>& x, int v, const Matrix4<Scalar>& gi) {
  Multivector<Scalar> out;
  const unsigned vmask = 1u << v;
  for (int i = 0; i < kBladeCount; ++i) {
    if (x[i] == Scalar(0)) continue;
    const unsigned a = kCanonicalMasks[i];
    const int s = wedge_sign(a, vmask);
    if (s != 0) out[kMaskToIndex[a | vmask]] += Scalar(s) * x[i];
    const auto idx = indices_of(BladeIndex{static_cast<std::uint8_t>(a)});
    const int k = static_cast<int>(idx.size());
    for (int p = 0; p < k; ++p) {
      const Scalar gv = gi(idx[p], v);
      if (gv == Scalar(0)) continue;
      const Scalar sign = ((k - 1 - p) & 1) ? Scalar(-1) : Scalar(1);
      out[kMaskToIndex[a & ~(1u << idx[p])]] += sign * gv * x[i];
    }
  }
  return out;
}

// u * blade(mask) via blade = dx^{b1} ^ W = dx^{b1} W - dx^{b1} _| W.
template <typename Scalar>
Multivector<Scalar> oracle_times_blade(const Multivector<Scalar>& u, unsigned mask, const Matrix4<Scalar>& gi) {
  if (mask == 0) return u;
  const int b1 = std::countr_zero(mask);
  const unsigned rest = mask & ~(1u << b1);
  Multivector<Scalar> out = oracle_times_blade(absorb_covector_right(u, b1, gi), rest, gi);
  const auto idx = indices_of(BladeIndex{static_cast<std::uint8_t>(rest)});
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const Scalar gv = gi(b1, idx[j]);
    if (gv == Scalar(0)) continue;
    const Scalar sign = (j & 1) ? Scalar(-1) : Scalar(1);
    out -= (sign * gv) * oracle_times_blade(u, rest & ~(1u << idx[j]), gi);
  }
  return out;
}

}  // namespace detail

// Independent Clifford product: expands v into blades and absorbs one covector
// at a time using dx^m dx^n = dx^m ^ dx^n + g^{mn}. Shares nothing with the
// grade table except the exterior-product sign convention.
template <typename Scalar>
Multivector<Scalar> clifford_mul_oracle(const Multivector<Scalar>& u, const Multivector<Scalar>& v,
                                        const MetricAtPoint<Scalar>& m) {
  Multivector<Scalar> out;
  for (int j = 0; j < kBladeCount; ++j) {
    if (v[j] == Scalar(0)) continue;
    out += v[j] * detail::oracle_times_blade(u, detail::kCanonicalMasks[j], m.ginv());
  }
  return out;
}

template <typename Scalar>
Multivector<Scalar> commutator(const Multivector<Scalar>& u, const Multivector<Scalar>& v,
                               const MetricAtPoint<Scalar>& m) {
  return clifford_mul(u, v, m) - clifford_mul(v, u, m);
}

template <typename Scalar>
Scalar trace(const Multivector<Scalar>& u) {
  return u[0];
}

// U* = (-1)^{k(k-1)/2} U on grade k.
template <typename Scalar>
Multivector<Scalar> reversion(const Multivector<Scalar>& u) {
  Multivector<Scalar> out = u;
  for (int i = grade_begin(2); i < grade_end(3); ++i) out[i] = -out[i];
  return out;
}

// Ubar = H U*.
template <typename Scalar>
Multivector<Scalar> conjugate(const Multivector<Scalar>& u, const Multivector<Scalar>& h,
                              const MetricAtPoint<Scalar>& m) {
  if (!h.is_homogeneous(1)) throw GradeError("conjugate: H must be a pure 1-form");
  return clifford_mul(h, reversion(u), m);
}

struct AlgebraTolerance {
  static constexpr double kComplexStructure = 1e-10;
  static constexpr double kSingularRcond = 1e-10;
};

// exp(lambda I) = cos(lambda) + I sin(lambda) for I with I^2 = -1.
template <typename Scalar>
Multivector<Scalar> exp_bivector(Scalar lambda, const Multivector<Scalar>& i, const MetricAtPoint<Scalar>& m) {
  if (!i.is_homogeneous(2)) throw GradeError("exp_bivector: I must be a pure 2-form");
  const Multivector<Scalar> sq = clifford_mul(i, i, m);
  if (max_abs_diff(sq, Multivector<Scalar>::scalar(Scalar(-1))) >
      Scalar(AlgebraTolerance::kComplexStructure) * std::max<Scalar>(Scalar(1), sq.norm_inf()))
    throw PreconditionViolation("exp_bivector: I^2 != -1");
  return Multivector<Scalar>::scalar(std::cos(lambda)) + std::sin(lambda) * i;
}

// Matrix of V -> U V on the 16 canonical coefficients.
template <typename Scalar>
Eigen::Matrix<Scalar, kBladeCount, kBladeCount> left_multiplication_matrix(const Multivector<Scalar>& u,
                                                                         const MetricAtPoint<Scalar>& m) {
  Eigen::Matrix<Scalar, kBladeCount, kBladeCount> mat;
  for (int j = 0; j < kBladeCount; ++j)
    mat.col(j) = clifford_mul(u, Multivector<Scalar>::blade(blade_at(j)), m).coeffs();
  return mat;
}

template <typename Scalar>
Eigen::Matrix<Scalar, kBladeCount, kBladeCount> right_multiplication_matrix(const Multivector<Scalar>& u,
                                                                          const MetricAtPoint<Scalar>& m) {
  Eigen::Matrix<Scalar, kBladeCount, kBladeCount> mat;
  for (int j = 0; j < kBladeCount; ++j)
    mat.col(j) = clifford_mul(Multivector<Scalar>::blade(blade_at(j)), u, m).coeffs();
  return mat;
}

// Solves U X = 1 on the coefficient space. Throws SingularMultivector when the
// reciprocal condition number of the left-multiplication map is below 1e-10.
template <typename Scalar>
Multivector<Scalar> inverse(const Multivector<Scalar>& u, const MetricAtPoint<Scalar>& m) {
  const auto mat = left_multiplication_matrix(u, m);
  Eigen::JacobiSVD<Eigen::Matrix<Scalar, kBladeCount, kBladeCount>> svd(mat, Eigen::ComputeFullU |
                                                                               Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv[0] > Scalar(0)) || sv[kBladeCount - 1] / sv[0] < Scalar(AlgebraTolerance::kSingularRcond))
    throw SingularMultivector("inverse: multivector is singular (rcond below 1e-10)");
  typename Multivector<Scalar>::Coeffs one = Multivector<Scalar>::Coeffs::Zero();
  one[0] = Scalar(1);
  return Multivector<Scalar>(typename Multivector<Scalar>::Coeffs(svd.solve(one)));
}

// S in Spin iff S is even and S* S = 1.
template <typename Scalar>
bool is_spin(const Multivector<Scalar>& s, const MetricAtPoint<Scalar>& m, Scalar tol) {
  for (int k : {1, 3})
    for (int i = grade_begin(k); i < grade_end(k); ++i)
      if (s[i] != Scalar(0)) return false;
  const Multivector<Scalar> prod = clifford_mul(reversion(s), s, m);
  return max_abs_diff(prod, Multivector<Scalar>::scalar(Scalar(1))) <= tol;
}

// exp(B) by scaled Taylor series; for a 2-form B the result lies in Spin.
template <typename Scalar>
Multivector<Scalar> exp_series(const Multivector<Scalar>& b, const MetricAtPoint<Scalar>& m) {
  int squarings = 0;
  Scalar scale = b.norm_inf();
  while (scale > Scalar(0.25)) {
    scale *= Scalar(0.5);
    ++squarings;
  }
  const Multivector<Scalar> x = b * std::ldexp(Scalar(1), -squarings);
  Multivector<Scalar> term = Multivector<Scalar>::scalar(Scalar(1));
  Multivector<Scalar> sum = term;
  for (int n = 1; n < 30; ++n) {
    term = clifford_mul(term, x, m) / Scalar(n);
    sum += term;
    if (term.norm_inf() < Scalar(1e-18)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = clifford_mul(sum, sum, m);
  return sum;
}

}  // namespace tdirac
