#include "tdirac/frame.hpp"

#include <cmath>

#include "tdirac/calculus.hpp"
#include "tdirac/errors.hpp"

namespace tdirac {

Eigen::Matrix4d orthonormal_coframe(const Eigen::Matrix4d& g) {
  Eigen::Matrix4d l = Eigen::Matrix4d::Identity();
  Eigen::Vector4d d;
  for (int j = 0; j < 4; ++j) {
    double dj = g(j, j);
    for (int k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d[k];
    d[j] = dj;
    for (int i = j + 1; i < 4; ++i) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k) * d[k];
      l(i, j) = s / dj;
    }
  }
  if (!(d[0] > 0.0 && d[1] < 0.0 && d[2] < 0.0 && d[3] < 0.0))
    throw PreconditionViolation("orthonormal_coframe: LDL^T pivots are not (+, -, -, -)");
  return d.cwiseAbs().cwiseSqrt().asDiagonal() * l.transpose();
}

MultivectorField coframe_field(const MetricField& mf, int a) {
  const MetricField metric = mf;
  return MultivectorField([metric, a](const Point& x) {
    const Eigen::Matrix4d e = orthonormal_coframe(metric.g_raw(x));
    return Multivectord::vector(e.row(a).transpose());
  });
}

Eigen::Matrix<double, 4, 6> bivector_commutator_matrix(const Multivectord& v, const MetricAtPointd& m) {
  Eigen::Matrix<double, 4, 6> out;
  for (int j = 0; j < 6; ++j) {
    const Multivectord b = Multivectord::blade(blade_at(grade_begin(2) + j));
    out.col(j) = commutator(b, v, m).coeffs().segment<4>(1);
  }
  return out;
}

std::array<MultivectorField, 4> coframe_connection(const MetricField& mf, double h) {
  std::array<MultivectorField, 4> theta;
  for (int a = 0; a < 4; ++a) theta[a] = coframe_field(mf, a);
  const MetricField metric = mf;
  std::array<MultivectorField, 4> out;
  for (int mu = 0; mu < 4; ++mu) {
    out[mu] = MultivectorField(
        [theta, metric, mu, h](const Point& x) {
          const MetricAtPointd m = metric.at(x);
          Eigen::Matrix<double, 16, 6> a;
          Eigen::Matrix<double, 16, 1> rhs;
          for (int k = 0; k < 4; ++k) {
            a.block<4, 6>(4 * k, 0) = bivector_commutator_matrix(theta[k](x), m);
            rhs.segment<4>(4 * k) = upsilon_leibniz(theta[k], mu, x, metric, h).coeffs().segment<4>(1);
          }
          const Eigen::Matrix<double, 6, 1> b = a.colPivHouseholderQr().solve(rhs);
          Multivectord out;
          out.coeffs().segment<6>(grade_begin(2)) = b;
          return out;
        },
        MultivectorField::PartialsFn{}, false);
  }
  return out;
}

}  // namespace tdirac
