#include <gtest/gtest.h>

#include <cmath>

#include "tdirac/affine.hpp"
#include "tdirac/errors.hpp"
#include "tdirac/tolerance.hpp"
#include "test_support.hpp"

using namespace tdirac;

namespace {

const TolerancePolicy kTol;

std::vector<MetricField> test_metrics() { return {metric_catalog("minkowski"), metric_catalog("flrw")}; }

Point interior(Rng& rng, const MetricField& mf) { return mf.box().random_interior(rng, 0.2); }

double max_abs(const Rank3& r) {
  double out = 0.0;
  for (const auto& m : r) out = std::max(out, m.cwiseAbs().maxCoeff());
  return out;
}

double max_diff(const Rank3& a, const Rank3& b) {
  double out = 0.0;
  for (int l = 0; l < 4; ++l) out = std::max(out, (a[l] - b[l]).cwiseAbs().maxCoeff());
  return out;
}

double max_diff(const Rank4& a, const Rank4& b) {
  double out = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out = std::max(out, (a[i][j] - b[i][j]).cwiseAbs().maxCoeff());
  return out;
}

Rank3 random_torsion(Rng& rng) {
  Rank3 t = zero_rank3();
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = m + 1; n < 4; ++n) {
        t[l](m, n) = rng.uniform(-1.0, 1.0);
        t[l](n, m) = -t[l](m, n);
      }
  return t;
}

// exp(theta dx^1 dx^2), theta = 0.5 x^1 - 0.3 x^0 x^2.
GaugeElement rotation_field() {
  const MetricAtPointd eta = MetricAtPointd::minkowski();
  const Multivectord i = Multivectord::basis({1, 2});
  return GaugeElement(MultivectorField(
      [i, eta](const Point& x) { return exp_bivector(0.5 * x[1] - 0.3 * x[0] * x[2], i, eta); },
      [i, eta](const Point& x) {
        const Multivectord u = clifford_mul(i, exp_bivector(0.5 * x[1] - 0.3 * x[0] * x[2], i, eta), eta);
        Partials p;
        p[0] = (-0.3 * x[2]) * u;
        p[1] = 0.5 * u;
        p[2] = (-0.3 * x[0]) * u;
        return p;
      }));
}

}  // namespace

// --- dictionary ----------------------------------------------------------------

TEST(Contorsion, ZeroGivesZeroB) {
  for (const auto& b : b_from_contorsion(ContorsionField::zero(), Point::Zero())) EXPECT_EQ(b.norm_inf(), 0.0);
}

TEST(Contorsion, RandomFieldsAreCompatibleAndPureGrade2) {
  Rng rng(101, "compat");
  const ChartBox box;
  for (int draw = 0; draw < 20; ++draw) {
    const ContorsionField k = random_contorsion(rng, box);
    const Point x = box.random_interior(rng, 0.1);
    EXPECT_LE(compatibility_defect(k.lower(x)), 1e-15);
    for (const auto& b : b_from_contorsion(k, x)) EXPECT_EQ(b.leakage_outside(2), 0.0);
  }
}

TEST(Contorsion, RejectsIncompatible) {
  Rank3 bad = zero_rank3();
  bad[0](1, 2) = 1.0;
  EXPECT_THROW(b_from_contorsion(bad), IncompatibleContorsion);
  EXPECT_THROW(ContorsionField([bad](const Point&) { return bad; }, {Point::Zero()}), IncompatibleContorsion);
}

TEST(Contorsion, CommutatorIdentity) {
  Rng rng(102, "commutator");
  for (const MetricField& mf : test_metrics()) {
    for (int draw = 0; draw < 20; ++draw) {
      const ContorsionField k = random_contorsion(rng, mf.box());
      const Point x = interior(rng, mf);
      const MetricAtPointd m = mf.at(x);
      const Rank3 mixed = k.mixed(x, mf);
      const Rank3 from_comm = contorsion_from_commutators(b_from_contorsion(k, x), m);
      EXPECT_LE(max_diff(mixed, from_comm), 1e-12 * std::max(1.0, max_abs(mixed))) << mf.label();
    }
  }
}

TEST(Contorsion, DictionaryRoundTrip) {
  Rng rng(103, "roundtrip");
  const ChartBox box;
  for (int draw = 0; draw < 20; ++draw) {
    const Rank3 k = random_contorsion(rng, box).lower(box.random_interior(rng, 0.1));
    EXPECT_LE(max_diff(contorsion_from_b(b_from_contorsion(k)), k), 1e-12);
  }
  std::array<Multivectord, 4> mixed_grade;
  mixed_grade[0] = Multivectord::basis({0});
  EXPECT_THROW(contorsion_from_b(mixed_grade), GradeError);
}

TEST(Torsion, ZeroAndRoundTrip) {
  const MetricAtPointd eta = MetricAtPointd::minkowski();
  EXPECT_EQ(max_abs(contorsion_from_torsion(zero_rank3(), eta)), 0.0);
  Rng rng(104, "torsion");
  for (int draw = 0; draw < 20; ++draw) {
    const MetricAtPointd m = random_metric(rng);
    const Rank3 t = random_torsion(rng);
    const Rank3 k = contorsion_from_torsion(t, m);
    EXPECT_LE(max_diff(torsion_from_contorsion(k), t), 1e-12);
    EXPECT_LE(compatibility_defect(lower_first(k, m.g())), 1e-12);
  }
}

TEST(Torsion, RejectsNonAntisymmetric) {
  Rank3 t = zero_rank3();
  t[1](0, 2) = 1.0;
  EXPECT_THROW(contorsion_from_torsion(t, MetricAtPointd::minkowski()), PreconditionViolation);
}

// --- affine connection -----------------------------------------------------------

TEST(AffineConnection, MetricCompatible) {
  Rng rng(111, "nabla-g");
  for (const MetricField& mf : test_metrics()) {
    for (int draw = 0; draw < 10; ++draw) {
      const ContorsionField k = random_contorsion(rng, mf.box());
      EXPECT_LE(affine_metric_defect(k, interior(rng, mf), mf), kTol.fd(1.0)) << mf.label();
    }
  }
}

TEST(AffineConnection, DerivativeTwoRoutes) {
  Rng rng(112, "affine-upsilon");
  for (const MetricField& mf : test_metrics()) {
    const MultivectorField u0 = random_smooth_field(rng, {0, 1, 2, 3, 4});
    EXPECT_EQ(affine_derivative_residual(u0, ContorsionField::zero(), Point::Zero(), mf, 1).norm_inf(), 0.0);
    for (int draw = 0; draw < 20; ++draw) {
      const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
      const ContorsionField k = random_contorsion(rng, mf.box());
      const Point x = interior(rng, mf);
      const int mu = rng.index(4);
      EXPECT_LE(affine_derivative_residual(u, k, x, mf, mu).norm_inf(), kTol.fd(5.0)) << mf.label();
    }
  }
}

TEST(AffineCurvature, ZeroContorsion) {
  const MetricField mink = metric_catalog("minkowski");
  const Rank4 r0 = affine_curvature(ContorsionField::zero(), Point(0.1, 0.2, 0.3, 0.4), mink);
  EXPECT_EQ(max_diff(r0, zero_rank4()), 0.0);

  const MetricField flrw = metric_catalog("flrw");
  const Point x(0.3, -0.2, 0.1, 0.4);
  EXPECT_LE(max_diff(affine_curvature(ContorsionField::zero(), x, flrw), riemann(flrw, x).lower), 1e-12);
}

TEST(Flatness, TwoRoutesOnRandomContorsions) {
  Rng rng(121, "flatness");
  for (const MetricField& mf : test_metrics()) {
    for (int draw = 0; draw < 10; ++draw) {
      const ContorsionField k = random_contorsion(rng, mf.box());
      const FlatnessCheck f = flatness_check(k, interior(rng, mf), mf);
      EXPECT_GT(f.scale, 1e-2);
      EXPECT_LE(f.residual, kTol.nested_fd(f.scale)) << mf.label();
    }
  }
}

TEST(Flatness, ZeroContorsionReducesToCurvature) {
  const MetricField mf = metric_catalog("flrw");
  const Point x(0.2, 0.1, -0.3, 0.2);
  const FlatnessCheck f = flatness_check(ContorsionField::zero(), x, mf);
  const Rank4 r = riemann(mf, x).lower;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_LE((f.q[a][b] + 0.5 * r[a][b]).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(f.residual, 1e-12);
}

// --- pure gauge ------------------------------------------------------------------

TEST(PureGauge, ConstantElementGivesZero) {
  const MetricField mf = metric_catalog("minkowski");
  Rng rng(131, "pg-const");
  const GaugeElement u(MultivectorField::constant(random_spin(rng, MetricAtPointd::minkowski())));
  const PureGauge pg = spin_pure_gauge_b(u, Point(0.1, 0.1, 0.1, 0.1), mf);
  for (const auto& b : pg.b) EXPECT_EQ(b.norm_inf(), 0.0);
}

TEST(PureGauge, RotationByHand) {
  const MetricField mf = metric_catalog("minkowski");
  const Point x(0.4, -0.2, 0.3, 0.1);
  const PureGauge pg = spin_pure_gauge_b(rotation_field(), x, mf);
  const Multivectord i = Multivectord::basis({1, 2});
  EXPECT_MV_NEAR(pg.b[0], (0.3 * x[2]) * i, 1e-14);
  EXPECT_MV_NEAR(pg.b[1], -0.5 * i, 1e-14);
  EXPECT_MV_NEAR(pg.b[2], (0.3 * x[0]) * i, 1e-14);
  EXPECT_EQ(pg.b[3].norm_inf(), 0.0);
  EXPECT_LE(pg.leakage, 1e-15);
}

TEST(PureGauge, Preconditions) {
  const Point x(0.1, 0.2, 0.3, 0.4);
  EXPECT_THROW(spin_pure_gauge_b(rotation_field(), x, metric_catalog("flrw")), PreconditionViolation);
  const GaugeElement bad(MultivectorField::constant(Multivectord::scalar(3.0)));
  EXPECT_THROW(spin_pure_gauge_b(bad, x, metric_catalog("minkowski")), NotSpin);
}

TEST(PureGauge, FlatEquationAndVanishingCurvature) {
  const MetricField mf = metric_catalog("minkowski");
  Rng rng(132, "pg-flat");
  for (int draw = 0; draw < 3; ++draw) {
    const GaugeElement u = random_spin_field(rng, mf);
    const GaugeField b = pure_gauge_b(u, mf);
    const ContorsionField k = contorsion_field_from_gauge(b, {Point::Zero()});
    for (int s = 0; s < 3; ++s) {
      const Point x = interior(rng, mf);
      EXPECT_LE(spin_pure_gauge_b(u, x, mf).leakage, 1e-13);
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) EXPECT_LE(residual_bg(b, x, mf, mu, nu).norm_inf(), kTol.fd(2.0));
      const FlatnessCheck f = flatness_check(k, x, mf);
      double qmax = 0.0;
      double rmax = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) {
          qmax = std::max(qmax, f.q[a][c].cwiseAbs().maxCoeff());
          rmax = std::max(rmax, f.rcheck[a][c].cwiseAbs().maxCoeff());
        }
      EXPECT_LE(qmax, kTol.fd(2.0));
      EXPECT_LE(rmax, kTol.fd(2.0));
    }
  }
}

TEST(PureGauge, CompositionLaw) {
  const MetricField mf = metric_catalog("minkowski");
  Rng rng(133, "pg-comp");
  const GaugeElement u = random_spin_field(rng, mf);
  const GaugeElement s = random_spin_field(rng, mf);
  const GaugeElement us(product(u.field(), s.field(), mf));
  DiracState st = DiracState::vacuum(1.0);
  st.b = pure_gauge_b(u, mf);
  const DiracState moved = gauge_spin(st, s, mf);
  for (int draw = 0; draw < 5; ++draw) {
    const Point x = interior(rng, mf);
    const PureGauge direct = spin_pure_gauge_b(us, x, mf);
    for (int mu = 0; mu < 4; ++mu) EXPECT_MV_NEAR(moved.b[mu](x), direct.b[mu], 1e-12);
  }
}

// --- JSON ------------------------------------------------------------------------

TEST(ContorsionJson, ConstantAndSampled) {
  std::vector<double> b(64, 0.0);
  b[16 * 0 + 4 * 1 + 2] = 0.5;   // b_{012}
  b[16 * 1 + 4 * 0 + 2] = -0.5;  // b_{102}
  const ContorsionField k = contorsion_from_json(Json{{"b", b}});
  const auto bm = b_from_contorsion(k, Point::Zero());
  EXPECT_MV_NEAR(bm[2], 0.5 * Multivectord::basis({0, 1}), 1e-15);

  Json nodes = Json::array();
  ChartBox box;
  box.n = {2, 2, 2, 2};
  for (int i = 0; i < 16; ++i) nodes.push_back(b);
  const ContorsionField ks = contorsion_from_json(Json{{"box", to_json(box)}, {"b", nodes}});
  EXPECT_MV_NEAR(b_from_contorsion(ks, Point(0.3, 0.1, -0.2, 0.5))[2], 0.5 * Multivectord::basis({0, 1}), 1e-15);

  std::vector<double> bad(64, 0.0);
  bad[16 * 0 + 4 * 1 + 2] = 0.5;
  EXPECT_THROW(contorsion_from_json(Json{{"b", bad}}), IncompatibleContorsion);
  EXPECT_THROW(contorsion_from_json(Json{{"b", std::vector<double>(3, 0.0)}}), ConfigError);
}
