#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tdirac/field.hpp"
#include "tdirac/geometry.hpp"
#include "tdirac/tolerance.hpp"

namespace tdirac {

using MultiIndex = std::vector<int>;

// Rank (r, s) tensor whose components are multivector fields.
// Entries are stored with the r contravariant indices first, then the s
// covariant ones; the first index is the most significant base-4 digit.
class IndexedField {
 public:
  IndexedField(int r, int s, std::vector<MultivectorField> entries);
  static IndexedField scalar(MultivectorField f);

  int r() const { return r_; }
  int s() const { return s_; }
  int rank() const { return r_ + s_; }
  std::size_t size() const { return entries_.size(); }

  const MultivectorField& at(const MultiIndex& index) const;
  const MultivectorField& at_flat(std::size_t i) const { return entries_[i]; }
  const std::vector<MultivectorField>& entries() const { return entries_; }

  static std::size_t flat(const MultiIndex& index);
  static MultiIndex unflat(std::size_t i, int rank);

 private:
  int r_;
  int s_;
  std::vector<MultivectorField> entries_;
};

// Pointwise values of an IndexedField, same layout.
struct IndexedValue {
  int r = 0;
  int s = 0;
  std::vector<Multivectord> entries;
};

IndexedValue evaluate(const IndexedField& t, const Point& x);

// u (x) v with the contravariant indices of u, then of v, then the covariant
// indices of u, then of v. Values are multiplied with the exterior product.
IndexedField tensor_product(const IndexedField& u, const IndexedField& v);

// g_{mn} as a rank (0, 2) field of scalars.
IndexedField metric_tensor_field(const MetricField& mf, double h = 1e-3);

// nabla_mu of one component of a tensor with grade-0 values.
Multivectord covariant_derivative(const IndexedField& t, const MultiIndex& index, int mu, const Point& x,
                                  const MetricField& mf, double h = 1e-3);
// All components of nabla_mu t.
IndexedValue covariant_derivative(const IndexedField& t, int mu, const Point& x, const MetricField& mf,
                                  double h = 1e-3);

// Linear map A with Upsilon_mu e^B = sum_C A(C, B) e^C, i.e. the connection
// part of the Clifford derivative acting on basis blades through the product
// rule. `gamma` is Gamma^l_{mn} as gamma[l](m, n) with m the derivative slot.
Eigen::Matrix<double, 16, 16> connection_action(const Rank3& gamma, int mu);

// Upsilon_mu U by coefficient derivatives plus the blade rule.
Multivectord upsilon_leibniz(const MultivectorField& u, int mu, const Point& x, const MetricField& mf,
                             double h = 1e-3);
// Same, for an arbitrary (not necessarily Levi-Civita) connection.
Multivectord upsilon_with_connection(const MultivectorField& u, int mu, const Point& x, const Rank3& gamma,
                                     const ChartBox& box, double h = 1e-3);
// Upsilon_mu U via the covariant components u_{n1...nk;mu}.
Multivectord upsilon_components(const MultivectorField& u, int mu, const Point& x, const MetricField& mf,
                                double h = 1e-3);

Multivectord d_op(const MultivectorField& u, const Point& x, const MetricField& mf, double h = 1e-3);
Multivectord upsilon_op(const MultivectorField& u, const Point& x, const MetricField& mf, double h = 1e-3);
Multivectord delta_op(const MultivectorField& u, const Point& x, const MetricField& mf, double h = 1e-3);

// The operators above as fields, for nesting. The result is flagged exact
// when no difference quotient enters its values.
MultivectorField upsilon_field(const MultivectorField& u, int mu, const MetricField& mf, double h = 1e-3);
MultivectorField d_field(const MultivectorField& u, const MetricField& mf, double h = 1e-3);
MultivectorField upsilon_op_field(const MultivectorField& u, const MetricField& mf, double h = 1e-3);
MultivectorField delta_field(const MultivectorField& u, const MetricField& mf, double h = 1e-3);

// (Y_mu Y_nu - Y_nu Y_mu) U - 1/2 [C_{mu nu}, U].
Multivectord curvature_commutator_check(const MultivectorField& u, const Point& x, const MetricField& mf, int mu,
                                        int nu, double h = 1e-3);

// Coefficient map for forms under dx^a = M(a, b) dxt^b: ut = O u with
// O(B, A) = det of M restricted to rows A, columns B.
Eigen::Matrix<double, 16, 16> outermorphism(const Eigen::Matrix4d& m);

// Components of t in coordinates xt = J x + shift.
IndexedField transform_indexed_field(const IndexedField& t, const Eigen::Matrix4d& jacobian, const Point& shift);

struct CoordinateChangeResult {
  double max_residual = 0.0;
  double scale = 0.0;  // largest operand magnitude seen
  bool pass = false;
};

// Compares the covariant derivative (Upsilon on the form values plus the
// connection on the tensor indices) computed in the new chart against the
// tensor transformation of the one computed in the old chart, at chart point
// x for every derivative direction. Throws JacobianError unless det J > 0.
CoordinateChangeResult coordinate_change_check(const IndexedField& t, const MetricField& mf,
                                               const Eigen::Matrix4d& jacobian, const Point& shift, const Point& x,
                                               double tol, double h = 1e-3);

namespace detail {
// Covariant derivative of a form-valued tensor: Upsilon_sigma on each value
// plus Gamma terms for each tensor index.
IndexedValue full_covariant_derivative(const IndexedField& t, int sigma, const Point& x, const MetricField& mf,
                                       double h);
}  // namespace detail

}  // namespace tdirac
