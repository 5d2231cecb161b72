#include <gtest/gtest.h>

#include <cmath>

#include "oracles/geometry_reference.hpp"
#include "tdirac/calculus.hpp"
#include "tdirac/errors.hpp"
#include "tdirac/random.hpp"
#include "test_support.hpp"

using namespace tdirac;

namespace {

const TolerancePolicy kTol;

std::vector<MetricField> catalog() {
  std::vector<MetricField> out;
  for (const auto& entry : catalog_entries()) out.push_back(metric_catalog(entry.name));
  return out;
}

std::vector<MetricField> curved() {
  return {metric_catalog("flrw"), metric_catalog("polynomial"), metric_catalog("conformal")};
}

Multivectord e(std::initializer_list<int> idx) { return Multivectord::basis(idx); }

MultivectorField constant_basis(std::initializer_list<int> idx) { return MultivectorField::constant(e(idx)); }

// Field x^c * dx^{idx} with analytic partials.
MultivectorField coordinate_times(int c, std::initializer_list<int> idx) {
  const Multivectord b = e(idx);
  return MultivectorField([b, c](const Point& x) { return x[c] * b; },
                          [b, c](const Point&) {
                            Partials p;
                            p[c] = b;
                            return p;
                          });
}

double scale_of(const Multivectord& a, const Multivectord& b) { return std::max(a.norm_inf(), b.norm_inf()); }

}  // namespace

TEST(CovariantDerivative, ScalarRule) {
  const MetricField mf = metric_catalog("minkowski");
  const ScalarField t([](const Point& x) { return Multivectord::scalar(x[0] * x[1]); });
  const Point x(0.2, -0.4, 0.1, 0.3);
  EXPECT_NEAR(covariant_derivative(IndexedField::scalar(t), {}, 0, x, mf).scalar_part(), -0.4, 1e-9);
}

TEST(CovariantDerivative, RejectsFormValuedComponents) {
  const MetricField mf = metric_catalog("minkowski");
  EXPECT_THROW(covariant_derivative(IndexedField::scalar(constant_basis({0})), 0, Point::Zero(), mf), GradeError);
}

TEST(CovariantDerivative, TensorProductLeibniz) {
  Rng rng(41, "rule-4");
  for (const MetricField& mf : curved()) {
    std::vector<MultivectorField> ue;
    std::vector<MultivectorField> ve;
    for (int i = 0; i < 4; ++i) {
      ue.push_back(random_scalar_field(rng));
      ve.push_back(random_scalar_field(rng));
    }
    const IndexedField u(1, 0, ue);
    const IndexedField v(0, 1, ve);
    const IndexedField uv = tensor_product(u, v);
    const Point x = mf.box().random_interior(rng, 0.05);
    for (int mu = 0; mu < 4; ++mu) {
      const IndexedValue d = covariant_derivative(uv, mu, x, mf);
      const IndexedValue du = covariant_derivative(u, mu, x, mf);
      const IndexedValue dv = covariant_derivative(v, mu, x, mf);
      const IndexedValue uval = evaluate(u, x);
      const IndexedValue vval = evaluate(v, x);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double expected = du.entries[a].scalar_part() * vval.entries[b].scalar_part() +
                                  uval.entries[a].scalar_part() * dv.entries[b].scalar_part();
          EXPECT_NEAR(d.entries[4 * a + b].scalar_part(), expected, 1e-12) << mf.label();
        }
    }
  }
}

TEST(Upsilon, ConstantFieldOverMinkowskiIsZero) {
  const MetricField mf = metric_catalog("minkowski");
  Rng rng(42, "const");
  const MultivectorField u = MultivectorField::constant(random_multivector(rng));
  for (int mu = 0; mu < 4; ++mu) {
    EXPECT_EQ(upsilon_leibniz(u, mu, Point::Zero(), mf).norm_inf(), 0.0);
    EXPECT_EQ(upsilon_components(u, mu, Point::Zero(), mf).norm_inf(), 0.0);
  }
}

TEST(Upsilon, BasisCovectorOverFlrwMatchesOracleChristoffels) {
  using namespace tdirac::reference;
  const MetricField mf = metric_catalog("flrw");
  const Point x(kFlrwPointB[0], kFlrwPointB[1], kFlrwPointB[2], kFlrwPointB[3]);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      Multivectord expected;
      for (int lam = 0; lam < 4; ++lam) expected -= kFlrwChristoffelB[16 * nu + 4 * mu + lam] * e({lam});
      EXPECT_MV_NEAR(upsilon_leibniz(MultivectorField::constant(e({nu})), mu, x, mf), expected, 1e-15);
      EXPECT_MV_NEAR(upsilon_components(MultivectorField::constant(e({nu})), mu, x, mf), expected, 1e-15);
    }
}

TEST(Upsilon, TwoImplementationsAgreeOnEveryCatalogMetric) {
  Rng rng(43, "two-routes");
  for (const MetricField& mf : catalog()) {
    for (int trial = 0; trial < 5; ++trial) {
      const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
      const Point x = mf.box().random_interior(rng, 0.05);
      for (int mu = 0; mu < 4; ++mu) {
        const Multivectord a = upsilon_leibniz(u, mu, x, mf);
        const Multivectord b = upsilon_components(u, mu, x, mf);
        EXPECT_MV_NEAR(a, b, 1e-12 * (1 + a.norm_inf())) << mf.label();
      }
    }
  }
}

TEST(Upsilon, PreservesGradeAndIsPartialOnMinkowski) {
  Rng rng(44, "grade");
  const MetricField flrw = metric_catalog("flrw");
  const MetricField flat = metric_catalog("minkowski");
  const Point x(0.1, 0.2, -0.3, 0.4);
  for (int k = 0; k <= 4; ++k) {
    const MultivectorField u = random_smooth_field(rng, {k});
    EXPECT_EQ(upsilon_leibniz(u, 0, x, flrw).leakage_outside(k), 0.0);
    for (int mu = 0; mu < 4; ++mu) EXPECT_MV_NEAR(upsilon_leibniz(u, mu, x, flat), u.partial(mu, x, flat.box(), 1e-3), 0.0);
  }
}

TEST(Upsilon, CliffordLeibnizOnCurvedMetrics) {
  Rng rng(45, "leibniz");
  for (const MetricField& mf : curved()) {
    const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
    const MultivectorField v = random_smooth_field(rng, {0, 1, 2, 3, 4});
    const MultivectorField uv = product(u, v, mf);
    const Point x = mf.box().random_interior(rng, 0.05);
    const MetricAtPointd m = mf.at(x);
    for (int mu = 0; mu < 4; ++mu) {
      const Multivectord lhs = upsilon_leibniz(uv, mu, x, mf);
      const Multivectord rhs = clifford_mul(upsilon_leibniz(u, mu, x, mf), v(x), m) +
                               clifford_mul(u(x), upsilon_leibniz(v, mu, x, mf), m);
      EXPECT_MV_NEAR(lhs, rhs, kTol.fd(scale_of(lhs, rhs))) << mf.label();
    }
  }
}

TEST(Upsilon, CommutesWithReversionStarAndTrace) {
  Rng rng(46, "commute");
  for (const MetricField& mf : curved()) {
    const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
    const Point x = mf.box().random_interior(rng, 0.05);
    for (int mu = 0; mu < 4; ++mu) {
      const Multivectord yu = upsilon_leibniz(u, mu, x, mf);
      EXPECT_MV_NEAR(upsilon_leibniz(reversion(u), mu, x, mf), reversion(yu), 1e-14);
      const Multivectord ystar = upsilon_leibniz(hodge_star(u, mf), mu, x, mf);
      EXPECT_MV_NEAR(ystar, hodge_star(yu, mf.at(x)), kTol.fd(scale_of(ystar, yu))) << mf.label();
      EXPECT_NEAR(upsilon_leibniz(grade_project(u, 0), mu, x, mf).scalar_part(), trace(yu), 1e-14);
    }
  }
}

TEST(ExteriorDerivative, Examples) {
  const MetricField flat = metric_catalog("minkowski");
  const Point x(0.3, 0.1, 0.2, -0.5);
  EXPECT_EQ(d_op(constant_basis({1, 2}), x, flat).norm_inf(), 0.0);
  EXPECT_MV_NEAR(d_op(coordinate_times(1, {0}), x, flat), -e({0, 1}), 0.0);
  EXPECT_EQ(d_op(constant_basis({1}), x, metric_catalog("conformal")).norm_inf(), 0.0);
}

TEST(ExteriorDerivative, RaisesGradeSquaresToZeroAndObeysLeibniz) {
  Rng rng(47, "d");
  for (const MetricField& mf : curved()) {
    const Point x = mf.box().random_interior(rng, 0.1);
    for (int k = 0; k <= 3; ++k) {
      const MultivectorField u = random_smooth_field(rng, {k});
      EXPECT_EQ(d_op(u, x, mf).leakage_outside(k + 1), 0.0);
      const Multivectord dd = d_op(d_field(u, mf), x, mf);
      EXPECT_LT(dd.norm_inf(), kTol.nested_fd(1.0)) << mf.label() << " grade " << k;
      const MultivectorField v = random_smooth_field(rng, {1});
      MultivectorField uv([u, v](const Point& p) { return wedge(u(p), v(p)); });
      const Multivectord lhs = d_op(uv, x, mf);
      const double sign = (k % 2) ? -1.0 : 1.0;
      const Multivectord rhs = wedge(d_op(u, x, mf), v(x)) + sign * wedge(u(x), d_op(v, x, mf));
      EXPECT_MV_NEAR(lhs, rhs, kTol.fd(scale_of(lhs, rhs)));
    }
  }
}

TEST(Codifferential, ScalarGradeMapsAndSquaresToZero) {
  Rng rng(48, "delta");
  for (const MetricField& mf : curved()) {
    const Point x = mf.box().random_interior(rng, 0.1);
    EXPECT_LT(delta_op(random_scalar_field(rng), x, mf).norm_inf(), 1e-14);
    for (int k = 1; k <= 4; ++k) {
      const MultivectorField u = random_smooth_field(rng, {k});
      EXPECT_EQ(delta_op(u, x, mf).leakage_outside(k - 1), 0.0);
      const Multivectord y = upsilon_op(u, x, mf);
      Multivectord rest = y;
      if (k + 1 <= 4) rest -= grade_project(y, k + 1);
      rest -= grade_project(y, k - 1);
      EXPECT_EQ(rest.norm_inf(), 0.0) << "Upsilon leaves grades k-1, k+1";
      const Multivectord dd = delta_op(delta_field(u, mf), x, mf);
      EXPECT_LT(dd.norm_inf(), kTol.nested_fd(1.0)) << mf.label() << " grade " << k;
    }
  }
}

TEST(Codifferential, EqualsStarDStar) {
  Rng rng(49, "star-d-star");
  for (const MetricField& mf : curved()) {
    for (int k = 1; k <= 4; ++k) {
      const MultivectorField u = random_smooth_field(rng, {k});
      const Point x = mf.box().random_interior(rng, 0.1);
      const Multivectord lhs = delta_op(u, x, mf);
      const Multivectord rhs = hodge_star(d_op(hodge_star(u, mf), x, mf), mf.at(x));
      EXPECT_MV_NEAR(lhs, rhs, kTol.fd(scale_of(lhs, rhs))) << mf.label() << " grade " << k;
    }
  }
}

TEST(CurvatureCommutator, VanishesOnMinkowski) {
  Rng rng(50, "flat-commutator");
  const MetricField mf = metric_catalog("minkowski");
  const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
  const Multivectord r = curvature_commutator_check(u, Point(0.1, 0.2, 0.3, 0.4), mf, 0, 2);
  EXPECT_LT(r.norm_inf(), kTol.nested_fd(1.0));
}

TEST(CurvatureCommutator, BasisCovectorReproducesRiemannOnFlrw) {
  const MetricField mf = metric_catalog("flrw");
  const Point x(0.4, -0.1, 0.2, 0.3);
  const CurvatureAtPoint r = riemann(mf, x);
  for (int lam = 0; lam < 4; ++lam)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const MultivectorField dx = constant_basis({lam});
        const MultivectorField y_mu = upsilon_field(dx, mu, mf);
        const MultivectorField y_nu = upsilon_field(dx, nu, mf);
        const Multivectord lhs = upsilon_leibniz(y_nu, mu, x, mf) - upsilon_leibniz(y_mu, nu, x, mf);
        Multivectord expected;
        for (int rho = 0; rho < 4; ++rho) expected -= r.mixed[lam][rho](mu, nu) * e({rho});
        EXPECT_MV_NEAR(lhs, expected, kTol.fd(1.0));
      }
}

TEST(CurvatureCommutator, RandomDenseFieldsOnCurvedMetrics) {
  Rng rng(51, "commutator");
  for (const MetricField& mf : curved()) {
    for (int trial = 0; trial < 10; ++trial) {
      const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
      const Point x = mf.box().random_interior(rng, 0.1);
      const int mu = rng.index(4);
      const int nu = rng.index(4);
      const Multivectord res = curvature_commutator_check(u, x, mf, mu, nu);
      EXPECT_LT(res.norm_inf(), kTol.nested_fd(u(x).norm_inf())) << mf.label();
    }
  }
}

TEST(CoordinateChange, IdentityMapIsExact) {
  Rng rng(52, "identity");
  const MetricField mf = metric_catalog("flrw");
  const IndexedField t = IndexedField::scalar(random_quadratic_field(rng, {0, 1, 2, 3, 4}));
  const CoordinateChangeResult r =
      coordinate_change_check(t, mf, Eigen::Matrix4d::Identity(), Point::Zero(), Point(0.1, 0.2, 0.3, 0.4), 1e-12);
  EXPECT_TRUE(r.pass) << r.max_residual;
}

TEST(CoordinateChange, LorentzBoostOnMinkowski) {
  Rng rng(53, "boost");
  const MetricField mf = metric_catalog("minkowski");
  const double rap = 0.3;
  Eigen::Matrix4d boost = Eigen::Matrix4d::Identity();
  boost(0, 0) = boost(1, 1) = std::cosh(rap);
  boost(0, 1) = boost(1, 0) = std::sinh(rap);
  const IndexedField form = IndexedField::scalar(random_quadratic_field(rng, {0, 1, 2, 3, 4}));
  std::vector<MultivectorField> entries;
  for (int i = 0; i < 4; ++i) entries.push_back(random_quadratic_field(rng, {0, 2}));
  const IndexedField tensor(0, 1, entries);
  for (const IndexedField* t : {&form, &tensor}) {
    const CoordinateChangeResult r = coordinate_change_check(*t, mf, boost, Point(0.05, 0.0, -0.1, 0.0),
                                                             Point(0.1, -0.2, 0.3, 0.1), 1e-10);
    EXPECT_TRUE(r.pass) << r.max_residual;
  }
}

TEST(CoordinateChange, ScalingOnCurvedMetric) {
  Rng rng(54, "scaling");
  const MetricField mf = metric_catalog("flrw");
  std::vector<MultivectorField> entries;
  for (int i = 0; i < 4; ++i) entries.push_back(random_smooth_field(rng, {0, 1}));
  const IndexedField t(1, 0, entries);
  const CoordinateChangeResult r = coordinate_change_check(t, mf, 0.8 * Eigen::Matrix4d::Identity(), Point::Zero(),
                                                           Point(0.1, 0.2, -0.3, 0.2), kTol.fd(4.0));
  EXPECT_TRUE(r.pass) << r.max_residual;
}

TEST(CoordinateChange, RescalingHalvesOneFormComponents) {
  const IndexedField t = IndexedField::scalar(constant_basis({2}));
  const IndexedField tt = transform_indexed_field(t, 2.0 * Eigen::Matrix4d::Identity(), Point::Zero());
  EXPECT_MV_NEAR(tt.at({})(Point::Zero()), 0.5 * e({2}), 1e-16);
  Eigen::Matrix4d flip = Eigen::Matrix4d::Identity();
  flip(0, 0) = -1.0;
  EXPECT_THROW(transform_indexed_field(t, flip, Point::Zero()), JacobianError);
  EXPECT_THROW(coordinate_change_check(t, metric_catalog("minkowski"), flip, Point::Zero(), Point::Zero(), 1.0),
               JacobianError);
}
