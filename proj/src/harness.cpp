#include "tdirac/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "tdirac/affine.hpp"
#include "tdirac/calculus.hpp"
#include "tdirac/dirac.hpp"
#include "tdirac/errors.hpp"
#include "tdirac/frame.hpp"
#include "tdirac/tolerance.hpp"

namespace tdirac {

std::string to_string(Tier t) {
  switch (t) {
    case Tier::algebraic: return "algebraic";
    case Tier::fd: return "fd";
    case Tier::nested_fd: return "nested_fd";
    case Tier::absolute: return "absolute";
  }
  return "unknown";
}

namespace {

// --- accumulation ------------------------------------------------------------

double normalize(Tier tier, double r, double s) {
  switch (tier) {
    case Tier::algebraic: return r / std::max(1.0, s);
    case Tier::fd:
    case Tier::nested_fd: return r / (1.0 + s);
    case Tier::absolute: return r;
  }
  return r;
}

class Accumulator {
 public:
  explicit Accumulator(Tier tier) : tier_(tier) {}

  // One sample with residual r and operand scale s.
  void add(double r, double s = 0.0) {
    ++samples_;
    const double v = normalize(tier_, std::abs(r), std::abs(s));
    if (std::isnan(v) || std::isnan(s)) {
      nan_ = true;
      return;
    }
    worst_ = std::max(worst_, v);
  }
  void add(const Multivectord& r, double s = 0.0) { add(r.norm_inf(), s); }

  double worst() const { return nan_ ? std::numeric_limits<double>::quiet_NaN() : worst_; }
  int samples() const { return samples_; }

 private:
  Tier tier_;
  double worst_ = 0.0;
  int samples_ = 0;
  bool nan_ = false;
};

struct Context {
  const MetricField& mf;
  TolerancePolicy tol;
  int samples;
  Rng rng;
  double margin;

  Point point() { return mf.box().random_interior(rng, margin); }
};

struct CheckDef {
  std::string id;
  std::string anchor;
  Tier tier;
  std::function<void(Context&, Accumulator&)> run;
  double bound = 0.0;  // tolerance for Tier::absolute, or a tighter default for other tiers
};

double base_tolerance(const CheckDef& def, const TolerancePolicy& tol) {
  if (def.bound > 0.0 || def.tier == Tier::absolute) return def.bound;
  switch (def.tier) {
    case Tier::algebraic: return tol.algebraic();
    case Tier::fd: return tol.fd();
    case Tier::nested_fd: return tol.nested_fd();
    case Tier::absolute: break;
  }
  return def.bound;
}

// --- small helpers -------------------------------------------------------------

double scale_of(const Multivectord& a, const Multivectord& b) { return std::max(a.norm_inf(), b.norm_inf()); }

double max_abs(const Rank3& r) {
  double out = 0.0;
  for (const auto& m : r) out = std::max(out, m.cwiseAbs().maxCoeff());
  return out;
}

double max_abs(const Rank4& r) {
  double out = 0.0;
  for (const auto& row : r)
    for (const auto& m : row) out = std::max(out, m.cwiseAbs().maxCoeff());
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

bool is_minkowski(const MetricField& mf) {
  if (!mf.is_constant()) return false;
  const Eigen::Matrix4d eta = Eigen::Vector4d(1, -1, -1, -1).asDiagonal();
  return (mf.g_raw(mf.box().lo) - eta).cwiseAbs().maxCoeff() <= 1e-12;
}

// Same values, every derivative by central differences.
MetricField without_derivatives(const MetricField& mf) {
  MetricField out(mf.label() + "-fd", mf.box(), [mf](const Point& x) { return mf.g_raw(x); });
  return out;
}

// Alternates between the configured metric at a sample point and a random
// constant metric.
MetricAtPointd algebra_metric(Context& ctx, int draw) {
  if (draw % 2 == 0) return ctx.mf.at(ctx.point());
  return random_metric(ctx.rng);
}

Multivectord e(std::initializer_list<int> idx) { return Multivectord::basis(idx); }

MaxwellState random_maxwell(Rng& rng, const MetricField& mf, double h) {
  MaxwellState ms;
  ms.a = random_smooth_field(rng, {1}, 1.0, 1.0);
  ms.f = d_field(ms.a, mf, h);
  ms.alpha = 0.5;
  return ms;
}

// --- algebra ---------------------------------------------------------------------

void add_algebra(std::vector<CheckDef>& out) {
  out.push_back({"algebra.product_oracle", "Clifford product table vs blade-expansion oracle", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const Multivectord u = random_multivector(c.rng), v = random_multivector(c.rng);
                     const Multivectord a = clifford_mul(u, v, m);
                     const Multivectord b = clifford_mul_oracle(u, v, m);
                     acc.add(max_abs_diff(a, b), scale_of(a, b));
                   }
                 },
                 1e-12});
  out.push_back({"algebra.associativity", "Clifford product associativity", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const Multivectord a = random_multivector(c.rng), b = random_multivector(c.rng),
                                        d = random_multivector(c.rng);
                     const Multivectord lhs = clifford_mul(clifford_mul(a, b, m), d, m);
                     const Multivectord rhs = clifford_mul(a, clifford_mul(b, d, m), m);
                     acc.add(max_abs_diff(lhs, rhs), scale_of(lhs, rhs));
                   }
                 }});
  out.push_back({"algebra.anticommutator", "dx^m dx^n + dx^n dx^m = 2 g^{mn}", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     double r = 0.0;
                     for (int mu = 0; mu < 4; ++mu)
                       for (int nu = 0; nu < 4; ++nu) {
                         const Multivectord ac = clifford_mul(e({mu}), e({nu}), m) + clifford_mul(e({nu}), e({mu}), m);
                         r = std::max(r, max_abs_diff(ac, Multivectord::scalar(2.0 * m.ginv()(mu, nu))));
                       }
                     acc.add(r, 2.0 * m.ginv().cwiseAbs().maxCoeff());
                   }
                 }});
  out.push_back({"algebra.com_commutator", "Com(U, V) = UV - VU on 2-forms", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const Multivectord u = random_homogeneous(c.rng, 2), v = random_homogeneous(c.rng, 2);
                     const Multivectord a = com(u, v, m);
                     const Multivectord b = clifford_mul(u, v, m) - clifford_mul(v, u, m);
                     acc.add(max_abs_diff(a, b), scale_of(a, b));
                   }
                 }});
  out.push_back({"algebra.double_star", "Hodge star squared: ** = (-1)^(k+1) on k-forms", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     for (int k = 0; k <= 4; ++k) {
                       const Multivectord u = random_homogeneous(c.rng, k);
                       const double sign = (k % 2 == 0) ? -1.0 : 1.0;
                       const Multivectord ss = hodge_star(hodge_star(u, m), m);
                       acc.add(max_abs_diff(ss, sign * u), u.norm_inf());
                     }
                   }
                 }});
  out.push_back({"algebra.trace_cyclicity", "Tr(UV) = Tr(VU)", Tier::algebraic, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const Multivectord u = random_multivector(c.rng), v = random_multivector(c.rng);
                     const Multivectord uv = clifford_mul(u, v, m);
                     const Multivectord vu = clifford_mul(v, u, m);
                     acc.add(trace(uv) - trace(vu), scale_of(uv, vu));
                   }
                 }});
  out.push_back({"algebra.reversion", "Reversion anti-homomorphism (UV)* = V* U*", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const Multivectord u = random_multivector(c.rng), v = random_multivector(c.rng);
                     const Multivectord lhs = reversion(clifford_mul(u, v, m));
                     const Multivectord rhs = clifford_mul(reversion(v), reversion(u), m);
                     acc.add(max_abs_diff(lhs, rhs), scale_of(lhs, rhs));
                   }
                 }});
  out.push_back({"algebra.conjugate_twice", "Double conjugation is conjugation by H", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const Eigen::Matrix4d frame = orthonormal_coframe(m.g());
                     const Multivectord h = Multivectord::vector(frame.row(0).transpose());
                     const Multivectord u = random_even(c.rng);
                     const Multivectord twice = conjugate(conjugate(u, h, m), h, m);
                     const Multivectord huh = clifford_mul(clifford_mul(h, u, m), h, m);
                     acc.add(max_abs_diff(twice, huh), scale_of(twice, huh));
                   }
                 }});
  out.push_back({"algebra.spin_closure", "Spin group closure under the product", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const Multivectord s = clifford_mul(random_spin(c.rng, m), random_spin(c.rng, m), m);
                     const Multivectord unit = clifford_mul(reversion(s), s, m);
                     double odd = 0.0;
                     for (int k : {1, 3})
                       for (int j = grade_begin(k); j < grade_end(k); ++j) odd = std::max(odd, std::abs(s[j]));
                     const double scale = s.norm_inf() * s.norm_inf();
                     acc.add(std::max(odd, max_abs_diff(unit, Multivectord::scalar(1.0))), scale);
                   }
                 }});
}

// --- geometry ----------------------------------------------------------------

void add_geometry(std::vector<CheckDef>& out, const MetricField& mf) {
  const Tier curvature_tier = mf.has_analytic_hessian() ? Tier::fd : Tier::nested_fd;
  out.push_back({"geometry.metric_axioms", "Metric symmetric with det < 0 and signature -2", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Point x = c.point();
                     const Eigen::Matrix4d g = c.mf.g_raw(x);
                     (void)c.mf.at(x);  // throws on det >= 0 or wrong signature
                     acc.add((g - g.transpose()).cwiseAbs().maxCoeff(), g.cwiseAbs().maxCoeff());
                   }
                 }});
  out.push_back({"geometry.christoffel_symmetry", "Levi-Civita symbols symmetric in the lower pair",
                 Tier::algebraic, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Rank3 g = christoffel(c.mf, c.point(), c.tol.h).gamma;
                     double r = 0.0;
                     for (const auto& m : g) r = std::max(r, (m - m.transpose()).cwiseAbs().maxCoeff());
                     acc.add(r, max_abs(g));
                   }
                 }});
  out.push_back({"geometry.metric_compatibility", "Metric compatibility nabla g = 0", Tier::fd,
                 [](Context& c, Accumulator& acc) {
                   const IndexedField g = metric_tensor_field(c.mf, c.tol.h);
                   for (int i = 0; i < c.samples; ++i) {
                     const Point x = c.point();
                     const double s = c.mf.g_raw(x).cwiseAbs().maxCoeff();
                     for (int mu = 0; mu < 4; ++mu) {
                       double r = 0.0;
                       for (const auto& v : covariant_derivative(g, mu, x, c.mf, c.tol.h).entries)
                         r = std::max(r, v.norm_inf());
                       acc.add(r, s);
                     }
                   }
                 }});
  out.push_back({"geometry.christoffel_fd_agreement", "Christoffel symbols: analytic vs finite-difference metric",
                 Tier::fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Point x = c.point();
                     const MetricAtPointd m = c.mf.at(x);
                     const Rank3 a = christoffel(c.mf, x, c.tol.h).gamma;
                     const Rank3 b = christoffel_from(m, c.mf.gradient_fd(x, c.tol.h)).gamma;
                     acc.add(max_diff(a, b), max_abs(a));
                   }
                 }});
  out.push_back({"geometry.riemann_fd_agreement", "Riemann tensor: analytic vs nested finite differences",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   const MetricField fd = without_derivatives(c.mf);
                   for (int i = 0; i < c.samples; ++i) {
                     const Point x = c.point();
                     const Rank4 a = riemann(c.mf, x, c.tol.h).mixed;
                     const Rank4 b = riemann(fd, x, c.tol.h).mixed;
                     acc.add(max_diff(a, b), max_abs(a));
                   }
                 }});
  out.push_back({"geometry.riemann_antisymmetry", "Riemann antisymmetry in each index pair", curvature_tier,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Rank4 r = riemann(c.mf, c.point(), c.tol.h).lower;
                     double res = 0.0;
                     for (int a = 0; a < 4; ++a)
                       for (int b = 0; b < 4; ++b) {
                         res = std::max(res, (r[a][b] + r[b][a]).cwiseAbs().maxCoeff());
                         res = std::max(res, (r[a][b] + r[a][b].transpose()).cwiseAbs().maxCoeff());
                       }
                     acc.add(res, max_abs(r));
                   }
                 }});
  out.push_back({"geometry.first_bianchi", "First Bianchi identity R^a_[bmn] = 0", curvature_tier,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Rank4 r = riemann(c.mf, c.point(), c.tol.h).mixed;
                     double res = 0.0;
                     for (int a = 0; a < 4; ++a)
                       for (int b = 0; b < 4; ++b)
                         for (int m = 0; m < 4; ++m)
                           for (int n = 0; n < 4; ++n)
                             res = std::max(res, std::abs(r[a][b](m, n) + r[a][m](n, b) + r[a][n](b, m)));
                     acc.add(res, max_abs(r));
                   }
                 }});
  out.push_back({"geometry.pair_symmetry", "Riemann pair symmetry R_abmn = R_mnab", curvature_tier,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Rank4 r = riemann(c.mf, c.point(), c.tol.h).lower;
                     double res = 0.0;
                     for (int a = 0; a < 4; ++a)
                       for (int b = 0; b < 4; ++b)
                         for (int m = 0; m < 4; ++m)
                           for (int n = 0; n < 4; ++n) res = std::max(res, std::abs(r[a][b](m, n) - r[m][n](a, b)));
                     acc.add(res, max_abs(r));
                   }
                 }});
  out.push_back({"geometry.curvature_form", "Curvature 2-form C_mn = 1/2 R_abmn dx^a ^ dx^b", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const CurvatureAtPoint r = riemann(c.mf, c.point(), c.tol.h);
                     double res = 0.0;
                     for (int m = 0; m < 4; ++m)
                       for (int n = 0; n < 4; ++n) {
                         const Multivectord& form = r.c2form[m][n];
                         res = std::max(res, form.leakage_outside(2));
                         for (int a = 0; a < 4; ++a)
                           for (int b = a + 1; b < 4; ++b)
                             res = std::max(res, std::abs(form[canonical_index((1u << a) | (1u << b))] -
                                                          r.lower[a][b](m, n)));
                       }
                     acc.add(res, max_abs(r.lower));
                   }
                 }});
}

// --- calculus ----------------------------------------------------------------------

void add_calculus(std::vector<CheckDef>& out) {
  out.push_back({"calculus.upsilon_two_routes", "Clifford derivative: Leibniz route vs covariant components",
                 Tier::algebraic, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MultivectorField u = random_smooth_field(c.rng, {0, 1, 2, 3, 4});
                     const Point x = c.point();
                     for (int mu = 0; mu < 4; ++mu) {
                       const Multivectord a = upsilon_leibniz(u, mu, x, c.mf, c.tol.h);
                       const Multivectord b = upsilon_components(u, mu, x, c.mf, c.tol.h);
                       acc.add(max_abs_diff(a, b), scale_of(a, b));
                     }
                   }
                 }});
  out.push_back({"calculus.clifford_leibniz", "Clifford derivative Leibniz rule over the product", Tier::fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MultivectorField u = random_smooth_field(c.rng, {0, 1, 2, 3, 4});
                     const MultivectorField v = random_smooth_field(c.rng, {0, 1, 2, 3, 4});
                     const MultivectorField uv = product(u, v, c.mf);
                     const Point x = c.point();
                     const MetricAtPointd m = c.mf.at(x);
                     const int mu = c.rng.index(4);
                     const Multivectord lhs = upsilon_leibniz(uv, mu, x, c.mf, c.tol.h);
                     const Multivectord rhs = clifford_mul(upsilon_leibniz(u, mu, x, c.mf, c.tol.h), v(x), m) +
                                              clifford_mul(u(x), upsilon_leibniz(v, mu, x, c.mf, c.tol.h), m);
                     acc.add(max_abs_diff(lhs, rhs), scale_of(lhs, rhs));
                   }
                 }});
  out.push_back({"calculus.upsilon_reversion", "Clifford derivative commutes with reversion and trace",
                 Tier::algebraic, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MultivectorField u = random_smooth_field(c.rng, {0, 1, 2, 3, 4});
                     const Point x = c.point();
                     const int mu = c.rng.index(4);
                     const Multivectord yu = upsilon_leibniz(u, mu, x, c.mf, c.tol.h);
                     const Multivectord yr = upsilon_leibniz(reversion(u), mu, x, c.mf, c.tol.h);
                     const double tr = upsilon_leibniz(grade_project(u, 0), mu, x, c.mf, c.tol.h).scalar_part();
                     acc.add(std::max(max_abs_diff(yr, reversion(yu)), std::abs(tr - trace(yu))), yu.norm_inf());
                   }
                 }});
  out.push_back({"calculus.upsilon_hodge", "Clifford derivative commutes with the Hodge star", Tier::fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MultivectorField u = random_smooth_field(c.rng, {0, 1, 2, 3, 4});
                     const Point x = c.point();
                     const int mu = c.rng.index(4);
                     const Multivectord ys = upsilon_leibniz(hodge_star(u, c.mf), mu, x, c.mf, c.tol.h);
                     const Multivectord sy = hodge_star(upsilon_leibniz(u, mu, x, c.mf, c.tol.h), c.mf.at(x));
                     acc.add(max_abs_diff(ys, sy), scale_of(ys, sy));
                   }
                 }});
  out.push_back({"calculus.d_squared", "Exterior derivative squares to zero", Tier::nested_fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const int k = i % 4;
                     const MultivectorField u = random_smooth_field(c.rng, {k});
                     const Point x = c.point();
                     acc.add(d_op(d_field(u, c.mf, c.tol.h), x, c.mf, c.tol.h), u(x).norm_inf());
                   }
                 }});
  out.push_back({"calculus.delta_squared", "Codifferential squares to zero", Tier::nested_fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const int k = 1 + i % 4;
                     const MultivectorField u = random_smooth_field(c.rng, {k});
                     const Point x = c.point();
                     acc.add(delta_op(delta_field(u, c.mf, c.tol.h), x, c.mf, c.tol.h), u(x).norm_inf());
                   }
                 }});
  out.push_back({"calculus.codifferential_hodge", "Codifferential delta = *d*", Tier::fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const int k = 1 + i % 4;
                     const MultivectorField u = random_smooth_field(c.rng, {k});
                     const Point x = c.point();
                     const Multivectord lhs = delta_op(u, x, c.mf, c.tol.h);
                     const Multivectord rhs = hodge_star(d_op(hodge_star(u, c.mf), x, c.mf, c.tol.h), c.mf.at(x));
                     acc.add(max_abs_diff(lhs, rhs), scale_of(lhs, rhs));
                   }
                 }});
  out.push_back({"calculus.curvature_commutator", "Commutator of Clifford derivatives equals 1/2 [C_mn, U]",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MultivectorField u = random_smooth_field(c.rng, {0, 1, 2, 3, 4});
                     const Point x = c.point();
                     const int mu = c.rng.index(4);
                     const int nu = c.rng.index(4);
                     acc.add(curvature_commutator_check(u, x, c.mf, mu, nu, c.tol.h), u(x).norm_inf());
                   }
                 }});
  out.push_back({"calculus.general_covariance", "Covariant derivative under a linear change of coordinates",
                 Tier::fd, [](Context& c, Accumulator& acc) {
                   Eigen::Matrix4d jac = 0.9 * Eigen::Matrix4d::Identity();
                   jac(1, 2) = 0.1;
                   jac(0, 3) = -0.05;
                   const Point shift(0.02, -0.01, 0.0, 0.03);
                   for (int i = 0; i < c.samples; ++i) {
                     std::vector<MultivectorField> entries;
                     for (int k = 0; k < 4; ++k) entries.push_back(random_smooth_field(c.rng, {0, 1, 2}));
                     const IndexedField t(0, 1, entries);
                     const CoordinateChangeResult r =
                         coordinate_change_check(t, c.mf, jac, shift, c.point(), 0.0, c.tol.h);
                     acc.add(r.max_residual, r.scale);
                   }
                 }});
}

// --- dirac -----------------------------------------------------------------------

void add_dirac(std::vector<CheckDef>& out, const MetricField& mf) {
  out.push_back({"dirac.constraints", "Test states satisfy Y H = [B, H], Y I = [B, I], H^2 = 1, I^2 = -1, [H, I] = 0",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     acc.add(residual_main(st, c.point(), c.mf, c.tol.h).constraints.max_abs(), 1.0);
                   }
                 }});
  out.push_back({"dirac.spin_covariance", "Spin gauge covariance: residual right-multiplied by S",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const GaugeElement s = random_spin_field(c.rng, c.mf);
                     const DiracState tr = gauge_spin(st, s, c.mf, c.tol.h);
                     const Point x = c.point();
                     const Multivectord want =
                         clifford_mul(residual_main(st, x, c.mf, c.tol.h).first_line, s(x), c.mf.at(x));
                     const Multivectord got = residual_main(tr, x, c.mf, c.tol.h).first_line;
                     acc.add(max_abs_diff(got, want), scale_of(got, want));
                   }
                 }});
  out.push_back({"dirac.u1_covariance", "U(1) gauge covariance: residual right-multiplied by exp(lambda I)",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const ScalarField lambda = random_scalar_field(c.rng, 1.0, 1.0);
                     const DiracState tr = gauge_u1(st, lambda, c.mf, c.tol.h);
                     const Point x = c.point();
                     const Multivectord s = u1_element(lambda, st.i, c.mf)(x);
                     const Multivectord want =
                         clifford_mul(residual_main(st, x, c.mf, c.tol.h).first_line, s, c.mf.at(x));
                     const Multivectord got = residual_main(tr, x, c.mf, c.tol.h).first_line;
                     acc.add(max_abs_diff(got, want), scale_of(got, want));
                   }
                 }});
  out.push_back({"dirac.lagrangian_invariance", "Lagrangian density invariant under Spin and U(1) gauge maps",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const GaugeElement s = random_spin_field(c.rng, c.mf);
                     const ScalarField lambda = random_scalar_field(c.rng, 1.0, 1.0);
                     const Point x = c.point();
                     const double l0 = lagrangian_density(st, x, c.mf, c.tol.h);
                     const double ls = lagrangian_density(gauge_spin(st, s, c.mf, c.tol.h), x, c.mf, c.tol.h);
                     const double lu = lagrangian_density(gauge_u1(st, lambda, c.mf, c.tol.h), x, c.mf, c.tol.h);
                     const double scale = std::max({std::abs(l0), std::abs(ls), std::abs(lu)});
                     acc.add(std::max(std::abs(ls - l0), std::abs(lu - l0)), scale);
                   }
                 }});
  out.push_back({"dirac.lagrangian_forms", "Lagrangian: Tr(sqrt(-g) H L I) vs expanded form", Tier::nested_fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const Point x = c.point();
                     const double a = lagrangian_density(st, x, c.mf, c.tol.h);
                     const double b = lagrangian_density_expanded(st, x, c.mf, c.tol.h);
                     acc.add(a - b, std::max(std::abs(a), std::abs(b)));
                   }
                 }});
  out.push_back({"dirac.conjugation_lemma", "Conjugated form of the Dirac 1-form L", Tier::nested_fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const Point x = c.point();
                     const Multivectord r = conjugate_lemma_check(st, x, c.mf, c.tol.h);
                     acc.add(r, dirac_form(st, x, c.mf, c.tol.h).norm_inf());
                   }
                 }});
  out.push_back({"dirac.trace_identity", "Tr(H(L + L*)) = d_mu(sqrt(-g) j^mu) / sqrt(-g)", Tier::nested_fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const ConservationResult r = conservation_residual(st, c.point(), c.mf, c.tol.h);
                     acc.add(r.identity_residual, r.scale);
                   }
                 }});
  out.push_back({"dirac.current_form", "Current 1-form Psi H Psi* matches j^mu = Tr(Psibar dx^mu Psi)",
                 Tier::algebraic, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const Point x = c.point();
                     const MetricAtPointd m = c.mf.at(x);
                     const Multivectord full = clifford_mul(clifford_mul(st.psi(x), st.h(x), m), reversion(st.psi(x)), m);
                     const Eigen::Vector4d raised = m.ginv() * current_form(st, x, c.mf).vector_part();
                     const Eigen::Vector4d j = current(st, x, c.mf);
                     const double r = std::max(full.leakage_outside(1), (raised - j).cwiseAbs().maxCoeff());
                     acc.add(r, std::max(full.norm_inf(), j.cwiseAbs().maxCoeff()));
                   }
                 }});
  out.push_back({"dirac.maxwell_closure", "Maxwell block: dF = 0 for F = dA", Tier::nested_fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MaxwellState ms = random_maxwell(c.rng, c.mf, c.tol.h);
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const Point x = c.point();
                     const MaxwellResidual r = maxwell_residual(ms, st, x, c.mf, c.tol.h);
                     acc.add(std::max(r.d_f.norm_inf(), r.da_minus_f.norm_inf()), ms.f(x).norm_inf());
                   }
                 }});
  out.push_back({"dirac.maxwell_lagrangian", "Maxwell Lagrangian Tr(sqrt(-g) F^2) = -1/2 sqrt(-g) f_mn f^mn",
                 Tier::algebraic, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = algebra_metric(c, i);
                     const MaxwellLagrangian l = maxwell_lagrangian(random_homogeneous(c.rng, 2), m);
                     acc.add(l.trace_form - l.component_form, std::max(std::abs(l.trace_form), std::abs(l.component_form)));
                   }
                 }});
  out.push_back({"dirac.ut_reduction", "Unified first line equals the Dirac first line when a = A", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const MaxwellState ms = random_maxwell(c.rng, c.mf, c.tol.h);
                     for (int mu = 0; mu < 4; ++mu) {
                       const MultivectorField a = ms.a;
                       st.a[mu] = ScalarField(
                           [a, mu](const Point& x) { return Multivectord::scalar(a(x).vector_part()[mu]); });
                     }
                     const Point x = c.point();
                     const Multivectord ut = residual_ut(st, ms, x, c.mf, c.tol.h).first_line;
                     const Multivectord main = residual_main(st, x, c.mf, c.tol.h).first_line;
                     acc.add(max_abs_diff(ut, main), scale_of(ut, main));
                   }
                 }});
  out.push_back({"dirac.ut_covariance", "Unified system covariance under Spin and U(1)", Tier::nested_fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, true, c.tol.h);
                     const MaxwellState ms = random_maxwell(c.rng, c.mf, c.tol.h);
                     const GaugeElement s = random_spin_field(c.rng, c.mf);
                     const ScalarField lambda = random_scalar_field(c.rng, 1.0, 1.0);
                     const Point x = c.point();
                     const MetricAtPointd m = c.mf.at(x);
                     const UtResidual r0 = residual_ut(st, ms, x, c.mf, c.tol.h);
                     const UtResidual rs = residual_ut(gauge_spin(st, s, c.mf, c.tol.h), ms, x, c.mf, c.tol.h);
                     const UtResidual ru = residual_ut(gauge_u1(st, lambda, c.mf, c.tol.h),
                                                       gauge_u1(ms, lambda, c.mf, c.tol.h), x, c.mf, c.tol.h);
                     const Multivectord want_s = clifford_mul(r0.first_line, s(x), m);
                     const Multivectord want_u = clifford_mul(r0.first_line, u1_element(lambda, st.i, c.mf)(x), m);
                     acc.add(max_abs_diff(rs.first_line, want_s), scale_of(rs.first_line, want_s));
                     acc.add(max_abs_diff(ru.first_line, want_u), scale_of(ru.first_line, want_u));
                   }
                 }});
  out.push_back({"dirac.bg_conjugation", "Gauge-field curvature equation conjugated by S under Spin maps",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const DiracState st = random_state(c.rng, c.mf, false, c.tol.h);
                     const GaugeElement s = random_spin_field(c.rng, c.mf);
                     const DiracState tr = gauge_spin(st, s, c.mf, c.tol.h);
                     const Point x = c.point();
                     const MetricAtPointd m = c.mf.at(x);
                     const int mu = c.rng.index(4);
                     const int nu = (mu + 1 + c.rng.index(3)) % 4;
                     const Multivectord sv = s(x);
                     const Multivectord want =
                         clifford_mul(clifford_mul(reversion(sv), residual_bg(st.b, x, c.mf, mu, nu, c.tol.h), m), sv, m);
                     const Multivectord got = residual_bg(tr.b, x, c.mf, mu, nu, c.tol.h);
                     acc.add(max_abs_diff(got, want), scale_of(got, want));
                   }
                 }});
  if (!is_minkowski(mf)) return;
  out.push_back({"dirac.planewave_residual", "Minkowski plane wave solves the Dirac system", Tier::absolute,
                 [](Context& c, Accumulator& acc) {
                   const Eigen::Vector4d p(std::sqrt(2.0), 1, 0, 0);
                   for (int sign : {1, -1}) {
                     const DiracState st = planewave_solve(p, 1.0, sign);
                     for (int i = 0; i < c.samples; ++i) {
                       const MainResidual r = residual_main(st, c.point(), c.mf, c.tol.h);
                       acc.add(std::max(r.first_line.norm_inf(), r.constraints.max_abs()));
                     }
                   }
                 },
                 1e-9});
  out.push_back({"dirac.gauge_fix_tde", "Pure-gauge B removed by S = U^-1 leaves the tensor Dirac equation",
                 Tier::absolute, [](Context& c, Accumulator& acc) {
                   const DiracState pw = planewave_solve(Eigen::Vector4d(std::sqrt(2.0), 1, 0, 0), 1.0);
                   const GaugeElement u = random_spin_field(c.rng, c.mf);
                   const DiracState fixed = minkowski_gauge_fix(gauge_spin(pw, u, c.mf, c.tol.h), u, c.mf, c.tol.h);
                   for (int i = 0; i < c.samples; ++i) acc.add(residual_tde(fixed, c.point(), c.mf, c.tol.h).max_abs());
                 },
                 1e-8});
  out.push_back({"dirac.parallel_closure", "Parallel fields closed under sum and product", Tier::fd,
                 [](Context& c, Accumulator& acc) {
                   const GaugeElement u0 = random_spin_field(c.rng, c.mf);
                   const GaugeField b = pure_gauge_b(u0, c.mf, c.tol.h);
                   auto parallel = [&](const Multivectord& w) {
                     const MultivectorField uf = u0.field();
                     return product(product(reversion(uf), MultivectorField::constant(w), c.mf), uf, c.mf);
                   };
                   const MultivectorField u1 = parallel(random_multivector(c.rng));
                   const MultivectorField u2 = parallel(random_multivector(c.rng));
                   const MultivectorField prod = product(u1, u2, c.mf);
                   const MultivectorField sum = u1 + u2;
                   for (int i = 0; i < c.samples; ++i) {
                     const Point x = c.point();
                     const int mu = c.rng.index(4);
                     for (const MultivectorField* f : {&u1, &prod, &sum})
                       acc.add(parallel_residual(*f, b, mu, x, c.mf, c.tol.h), (*f)(x).norm_inf());
                   }
                 }});
}

// --- affine ------------------------------------------------------------------------

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

void add_affine(std::vector<CheckDef>& out, const MetricField& mf) {
  out.push_back({"affine.commutator_dictionary", "[B_m, dx^n] = K^n_ml dx^l", Tier::algebraic,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const ContorsionField k = random_contorsion(c.rng, c.mf.box());
                     const Point x = c.point();
                     const Rank3 mixed = k.mixed(x, c.mf);
                     const Rank3 from_comm = contorsion_from_commutators(b_from_contorsion(k, x), c.mf.at(x));
                     acc.add(max_diff(mixed, from_comm), max_abs(mixed));
                   }
                 }});
  out.push_back({"affine.dictionary_round_trip", "Contorsion -> B -> contorsion round trip", Tier::absolute,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Rank3 k = random_contorsion(c.rng, c.mf.box()).lower(c.point());
                     acc.add(max_diff(contorsion_from_b(b_from_contorsion(k)), k));
                   }
                 },
                 1e-12});
  out.push_back({"affine.torsion_round_trip", "Torsion -> contorsion -> torsion round trip", Tier::absolute,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MetricAtPointd m = c.mf.at(c.point());
                     const Rank3 t = random_torsion(c.rng);
                     const Rank3 k = contorsion_from_torsion(t, m);
                     acc.add(std::max(max_diff(torsion_from_contorsion(k), t), compatibility_defect(lower_first(k, m.g()))));
                   }
                 },
                 1e-12});
  out.push_back({"affine.metric_compatibility", "Affine connection Gamma + K is metric compatible", Tier::fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const ContorsionField k = random_contorsion(c.rng, c.mf.box());
                     const Point x = c.point();
                     acc.add(affine_metric_defect(k, x, c.mf, c.tol.h), c.mf.g_raw(x).cwiseAbs().maxCoeff());
                   }
                 }});
  out.push_back({"affine.derivative_two_routes", "Affine Clifford derivative equals Y_m U - [B_m, U]", Tier::fd,
                 [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const MultivectorField u = random_smooth_field(c.rng, {0, 1, 2, 3, 4});
                     const ContorsionField k = random_contorsion(c.rng, c.mf.box());
                     const Point x = c.point();
                     const int mu = c.rng.index(4);
                     acc.add(affine_derivative_residual(u, k, x, c.mf, mu, c.tol.h), u(x).norm_inf());
                   }
                 }});
  out.push_back({"affine.flatness_two_routes",
                 "Affine curvature R-check = -2 q (R-check_abmn uses the lowered first index of Gamma + K)",
                 Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const ContorsionField k = random_contorsion(c.rng, c.mf.box());
                     const FlatnessCheck f = flatness_check(k, c.point(), c.mf, c.tol.h);
                     acc.add(f.residual, f.scale);
                   }
                 }});
  out.push_back({"affine.zero_contorsion_curvature", "Affine curvature with K = 0 equals the Riemann tensor",
                 mf.has_analytic_hessian() ? Tier::fd : Tier::nested_fd, [](Context& c, Accumulator& acc) {
                   for (int i = 0; i < c.samples; ++i) {
                     const Point x = c.point();
                     const Rank4 a = affine_curvature(ContorsionField::zero(), x, c.mf, c.tol.h);
                     const Rank4 r = riemann(c.mf, x, c.tol.h).lower;
                     acc.add(max_diff(a, r), max_abs(r));
                   }
                 }});
  if (!is_minkowski(mf)) return;
  out.push_back({"affine.pure_gauge_flatness", "Pure-gauge B = -U^-1 dU: curvature equation and R-check vanish",
                 Tier::fd, [](Context& c, Accumulator& acc) {
                   const int fields = std::max(1, c.samples / 5);
                   for (int j = 0; j < fields; ++j) {
                     const GaugeElement u = random_spin_field(c.rng, c.mf);
                     const GaugeField b = pure_gauge_b(u, c.mf, c.tol.h);
                     const ContorsionField k = contorsion_field_from_gauge(b, {c.mf.box().lo});
                     for (int s = 0; s < 5; ++s) {
                       const Point x = c.point();
                       double bg = 0.0;
                       for (int mu = 0; mu < 4; ++mu)
                         for (int nu = mu + 1; nu < 4; ++nu)
                           bg = std::max(bg, residual_bg(b, x, c.mf, mu, nu, c.tol.h).norm_inf());
                       const FlatnessCheck f = flatness_check(k, x, c.mf, c.tol.h);
                       acc.add(std::max({bg, max_abs(f.q), max_abs(f.rcheck)}), 1.0);
                     }
                   }
                 }});
  out.push_back({"affine.pure_gauge_composition", "Pure gauge of U S equals the Spin transform of pure gauge of U",
                 Tier::algebraic, [](Context& c, Accumulator& acc) {
                   const GaugeElement u = random_spin_field(c.rng, c.mf);
                   const GaugeElement s = random_spin_field(c.rng, c.mf);
                   const GaugeElement us(product(u.field(), s.field(), c.mf));
                   DiracState st = DiracState::vacuum(1.0);
                   st.b = pure_gauge_b(u, c.mf, c.tol.h);
                   const DiracState moved = gauge_spin(st, s, c.mf, c.tol.h);
                   for (int i = 0; i < c.samples; ++i) {
                     const Point x = c.point();
                     const PureGauge direct = spin_pure_gauge_b(us, x, c.mf, c.tol.h);
                     for (int mu = 0; mu < 4; ++mu)
                       acc.add(max_abs_diff(moved.b[mu](x), direct.b[mu]), direct.b[mu].norm_inf());
                   }
                 }});
}

// --- running -----------------------------------------------------------------------

void add_suite(const std::string& suite, const MetricField& mf, std::vector<CheckDef>& out) {
  if (suite == "algebra") add_algebra(out);
  else if (suite == "geometry") add_geometry(out, mf);
  else if (suite == "calculus") add_calculus(out);
  else if (suite == "dirac") add_dirac(out, mf);
  else if (suite == "affine") add_affine(out, mf);
  else throw ConfigError("unknown suite '" + suite + "' (expected algebra, geometry, calculus, dirac, affine or all)");
}

// Every check id any configuration can produce.
const std::set<std::string>& known_check_ids() {
  static const std::set<std::string> ids = [] {
    std::set<std::string> out;
    const MetricField mink = metric_catalog("minkowski");
    std::vector<CheckDef> defs;
    for (const char* s : {"algebra", "geometry", "calculus", "dirac", "affine"}) add_suite(s, mink, defs);
    for (const auto& d : defs) out.insert(d.id);
    for (const char* id : {"planewave.residual_main", "planewave.constraints", "planewave.conservation",
                           "planewave.dispersion", "planewave.spin_covariance", "planewave.lagrangian_invariance",
                           "planewave.gauge_fix_tde", "harness.injected_failure"})
      out.insert(id);
    return out;
  }();
  return ids;
}

void check_tolerance_keys(const std::map<std::string, double>& tolerances) {
  for (const auto& [id, value] : tolerances) {
    if (!known_check_ids().count(id)) throw ConfigError("tolerance override for unknown check '" + id + "'");
    if (!(value >= 0.0) || !std::isfinite(value))
      throw ConfigError("tolerance for '" + id + "' must be a finite non-negative number");
  }
}

double default_margin(const ChartBox& box) {
  const double extent = (box.hi - box.lo).minCoeff();
  return std::min(0.2, 0.25 * extent);
}

CheckRecord run_check(const CheckDef& def, const MetricField& mf, double h, int samples, std::uint64_t seed,
                      const std::map<std::string, double>& overrides) {
  TolerancePolicy tol;
  tol.h = h;
  Context ctx{mf, tol, samples, Rng(seed, def.id), default_margin(mf.box())};
  Accumulator acc(def.tier);
  const auto t0 = std::chrono::steady_clock::now();
  def.run(ctx, acc);
  const auto t1 = std::chrono::steady_clock::now();

  CheckRecord rec;
  rec.id = def.id;
  rec.anchor = def.anchor;
  rec.tier = def.tier;
  rec.max_residual = acc.worst();
  const auto it = overrides.find(def.id);
  rec.tolerance = it != overrides.end() ? it->second : base_tolerance(def, tol);
  rec.pass = rec.max_residual <= rec.tolerance;  // false for NaN
  rec.samples = acc.samples();
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

CheckRecord injected_failure() {
  CheckRecord rec;
  rec.id = "harness.injected_failure";
  rec.anchor = "Deliberately failing check for exit-status testing";
  rec.tier = Tier::absolute;
  rec.max_residual = 1.0;
  rec.tolerance = 0.0;
  rec.pass = false;
  rec.samples = 1;
  return rec;
}

void finish(Report& report, bool inject) {
  if (inject) report.checks.push_back(injected_failure());
  std::sort(report.checks.begin(), report.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
}

void validate_common(double h, int samples) {
  if (!(h > 0.0) || h > 0.1 || !std::isfinite(h)) throw ConfigError("h must lie in (0, 0.1]");
  if (samples < 1) throw ConfigError("samples must be at least 1");
}

// --- JSON helpers ------------------------------------------------------------------

template <typename T>
T get_as(const Json& j, const char* key, const T& fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config key '") + key + "': " + ex.what());
  }
}

std::optional<std::string> box_from_json(const Json& j, const std::optional<std::string>& fallback) {
  if (!j.contains("box") || j["box"].is_null()) return fallback;
  const Json& b = j["box"];
  if (b.is_string()) return b.get<std::string>();
  if (b.is_object()) {
    const ChartBox box = chart_box_from_json(b);
    std::ostringstream os;
    os << std::setprecision(17);
    for (int k = 0; k < 4; ++k) os << (k ? "," : "") << box.lo[k] << ":" << box.hi[k];
    os << "@";
    for (int k = 0; k < 4; ++k) os << (k ? "," : "") << box.n[k];
    return os.str();
  }
  throw ConfigError("config key 'box' must be a string or an object");
}

std::map<std::string, double> tolerances_from_json(const Json& j, std::map<std::string, double> fallback) {
  if (!j.contains("tolerances") || j["tolerances"].is_null()) return fallback;
  if (!j["tolerances"].is_object()) throw ConfigError("config key 'tolerances' must be an object");
  for (const auto& [k, v] : j["tolerances"].items()) {
    if (!v.is_number()) throw ConfigError("tolerance for '" + k + "' must be a number");
    fallback[k] = v.get<double>();
  }
  return fallback;
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown config key '" + k + "'");
  }
}

Json box_json(const std::optional<std::string>& box) { return box ? Json(*box) : Json(nullptr); }

}  // namespace

// --- public API --------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"algebra", "geometry", "calculus", "dirac", "affine", "all"};
  return names;
}

Json to_json(const SuiteConfig& cfg) {
  return Json{{"suite", cfg.suite},       {"metric", cfg.metric},   {"box", box_json(cfg.box)},
              {"h", cfg.h},               {"seed", cfg.seed},       {"samples", cfg.samples},
              {"tolerances", cfg.tolerances}, {"inject_failure", cfg.inject_failure}};
}

Json to_json(const PlanewaveConfig& cfg) {
  return Json{{"p", std::vector<double>(cfg.p.data(), cfg.p.data() + 4)},
              {"m", cfg.m},
              {"sign", cfg.sign},
              {"box", box_json(cfg.box)},
              {"h", cfg.h},
              {"seed", cfg.seed},
              {"samples", cfg.samples},
              {"tolerances", cfg.tolerances},
              {"inject_failure", cfg.inject_failure}};
}

SuiteConfig suite_config_from_json(const Json& j, SuiteConfig base) {
  reject_unknown_keys(j, {"suite", "metric", "box", "h", "seed", "samples", "tolerances", "inject_failure"});
  base.suite = get_as(j, "suite", base.suite);
  base.metric = get_as(j, "metric", base.metric);
  base.box = box_from_json(j, base.box);
  base.h = get_as(j, "h", base.h);
  base.seed = get_as(j, "seed", base.seed);
  base.samples = get_as(j, "samples", base.samples);
  base.tolerances = tolerances_from_json(j, base.tolerances);
  base.inject_failure = get_as(j, "inject_failure", base.inject_failure);
  return base;
}

PlanewaveConfig planewave_config_from_json(const Json& j, PlanewaveConfig base) {
  reject_unknown_keys(j, {"p", "m", "sign", "box", "h", "seed", "samples", "tolerances", "inject_failure"});
  if (j.contains("p")) {
    const auto p = get_as(j, "p", std::vector<double>{});
    if (p.size() != 4) throw ConfigError("config key 'p' needs 4 components");
    base.p = Eigen::Vector4d(p[0], p[1], p[2], p[3]);
  }
  base.m = get_as(j, "m", base.m);
  base.sign = get_as(j, "sign", base.sign);
  base.box = box_from_json(j, base.box);
  base.h = get_as(j, "h", base.h);
  base.seed = get_as(j, "seed", base.seed);
  base.samples = get_as(j, "samples", base.samples);
  base.tolerances = tolerances_from_json(j, base.tolerances);
  base.inject_failure = get_as(j, "inject_failure", base.inject_failure);
  return base;
}

int Report::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; }));
}

int Report::failed() const { return static_cast<int>(checks.size()) - passed(); }

Json Report::to_json(bool include_timing) const {
  Json list = Json::array();
  for (const CheckRecord& c : checks) {
    Json rec{{"id", c.id},
             {"anchor", c.anchor},
             {"tier", tdirac::to_string(c.tier)},
             {"max_residual", std::isnan(c.max_residual) ? Json("nan") : Json(c.max_residual)},
             {"tolerance", c.tolerance},
             {"pass", c.pass},
             {"samples", c.samples}};
    if (include_timing) rec["wall_time_ms"] = c.wall_time_ms;
    list.push_back(std::move(rec));
  }
  Json out{{"version", kVersion},
           {"kind", kind},
           {"config", config},
           {"metric", {{"label", metric_label}, {"interpolated", interpolated_metric}}},
           {"summary", {{"checks", checks.size()}, {"passed", passed()}, {"failed", failed()}, {"all_passed", all_passed()}}},
           {"checks", std::move(list)}};
  if (interpolated_metric)
    out["metric"]["note"] = "grid-interpolated metric: derivatives are piecewise and residuals are less accurate";
  return out;
}

std::string Report::table() const {
  std::size_t width = 5;
  for (const CheckRecord& c : checks) width = std::max(width, c.id.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width) + 2) << "check" << std::setw(11) << "tier" << std::right
     << std::setw(13) << "residual" << std::setw(13) << "tolerance" << std::setw(9) << "samples" << std::setw(11)
     << "time[ms]"
     << "  result\n";
  os << std::scientific << std::setprecision(3);
  for (const CheckRecord& c : checks) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << c.id << std::setw(11) << to_string(c.tier)
       << std::right << std::setw(13) << c.max_residual << std::setw(13) << c.tolerance << std::setw(9) << c.samples
       << std::fixed << std::setprecision(1) << std::setw(11) << c.wall_time_ms << std::scientific
       << std::setprecision(3) << "  " << (c.pass ? "PASS" : "FAIL") << "\n";
  }
  os << passed() << "/" << checks.size() << " checks passed\n";
  return os.str();
}

Report run_suite(const SuiteConfig& cfg) {
  validate_common(cfg.h, cfg.samples);
  check_tolerance_keys(cfg.tolerances);
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end())
    throw ConfigError("unknown suite '" + cfg.suite + "' (expected algebra, geometry, calculus, dirac, affine or all)");

  MetricField mf = metric_from_descriptor(cfg.metric);
  if (cfg.box) mf.set_box(parse_box(*cfg.box));
  mf.validate_on_grid();

  std::vector<CheckDef> defs;
  if (cfg.suite == "all")
    for (const char* s : {"algebra", "geometry", "calculus", "dirac", "affine"}) add_suite(s, mf, defs);
  else
    add_suite(cfg.suite, mf, defs);

  Report report;
  report.kind = "verify";
  report.config = to_json(cfg);
  report.config["box"] = tdirac::to_json(mf.box());
  report.metric_label = mf.descriptor().empty() ? mf.label() : mf.descriptor();
  report.interpolated_metric = mf.is_interpolated();
  for (const CheckDef& def : defs) report.checks.push_back(run_check(def, mf, cfg.h, cfg.samples, cfg.seed, cfg.tolerances));
  finish(report, cfg.inject_failure);
  return report;
}

Report run_planewave(const PlanewaveConfig& cfg) {
  validate_common(cfg.h, cfg.samples);
  check_tolerance_keys(cfg.tolerances);
  if (cfg.sign != 1 && cfg.sign != -1) throw ConfigError("sign must be +1 or -1");

  MetricField mf = metric_catalog("minkowski");
  if (cfg.box) mf.set_box(parse_box(*cfg.box));
  const DiracState st = planewave_solve(cfg.p, cfg.m, cfg.sign);  // dispersion gate
  const double p2 = cfg.p[0] * cfg.p[0] - cfg.p.tail<3>().squaredNorm();

  std::vector<CheckDef> defs;
  defs.push_back({"planewave.dispersion", "Mass shell p_mu p^mu = m^2", Tier::absolute,
                  [p2, m = cfg.m](Context&, Accumulator& acc) { acc.add(p2 - m * m); },
                  1e-12 * std::max(1.0, cfg.m * cfg.m)});
  defs.push_back({"planewave.residual_main", "Plane wave solves the first line of the Dirac system", Tier::absolute,
                  [st](Context& c, Accumulator& acc) {
                    for (int i = 0; i < c.samples; ++i)
                      acc.add(residual_main(st, c.point(), c.mf, c.tol.h).first_line);
                  },
                  1e-9});
  defs.push_back({"planewave.constraints", "Plane wave satisfies the H, I constraints", Tier::absolute,
                  [st](Context& c, Accumulator& acc) {
                    for (int i = 0; i < c.samples; ++i)
                      acc.add(residual_main(st, c.point(), c.mf, c.tol.h).constraints.max_abs());
                  },
                  1e-9});
  defs.push_back({"planewave.conservation", "Current conservation d_mu j^mu = 0", Tier::absolute,
                  [st](Context& c, Accumulator& acc) {
                    for (int i = 0; i < c.samples; ++i)
                      acc.add(conservation_residual(st, c.point(), c.mf, c.tol.h).divergence);
                  },
                  1e-8});
  defs.push_back({"planewave.spin_covariance", "Spin-transformed plane wave: residual right-multiplied by S",
                  Tier::nested_fd, [st](Context& c, Accumulator& acc) {
                    const GaugeElement s = random_spin_field(c.rng, c.mf);
                    const DiracState tr = gauge_spin(st, s, c.mf, c.tol.h);
                    for (int i = 0; i < c.samples; ++i) {
                      const Point x = c.point();
                      const MainResidual r0 = residual_main(st, x, c.mf, c.tol.h);
                      const MainResidual r1 = residual_main(tr, x, c.mf, c.tol.h);
                      const Multivectord want = clifford_mul(r0.first_line, s(x), c.mf.at(x));
                      acc.add(std::max(max_abs_diff(r1.first_line, want), r1.constraints.max_abs()),
                              st.psi(x).norm_inf());
                    }
                  }});
  defs.push_back({"planewave.lagrangian_invariance", "Lagrangian density invariant under a Spin gauge map",
                  Tier::nested_fd, [st](Context& c, Accumulator& acc) {
                    const GaugeElement s = random_spin_field(c.rng, c.mf);
                    const DiracState tr = gauge_spin(st, s, c.mf, c.tol.h);
                    for (int i = 0; i < c.samples; ++i) {
                      const Point x = c.point();
                      const double l0 = lagrangian_density(st, x, c.mf, c.tol.h);
                      const double l1 = lagrangian_density(tr, x, c.mf, c.tol.h);
                      acc.add(l1 - l0, std::max({std::abs(l0), std::abs(l1), st.psi(x).norm_inf()}));
                    }
                  }});
  defs.push_back({"planewave.gauge_fix_tde", "Gauge fix S = U^-1 returns the tensor Dirac equation",
                  Tier::absolute, [st](Context& c, Accumulator& acc) {
                    const GaugeElement u = random_spin_field(c.rng, c.mf);
                    const DiracState fixed = minkowski_gauge_fix(gauge_spin(st, u, c.mf, c.tol.h), u, c.mf, c.tol.h);
                    for (int i = 0; i < c.samples; ++i)
                      acc.add(residual_tde(fixed, c.point(), c.mf, c.tol.h).max_abs());
                  },
                  1e-8});

  Report report;
  report.kind = "planewave";
  report.config = to_json(cfg);
  report.config["box"] = tdirac::to_json(mf.box());
  report.metric_label = "minkowski";
  for (const CheckDef& def : defs) report.checks.push_back(run_check(def, mf, cfg.h, cfg.samples, cfg.seed, cfg.tolerances));
  finish(report, cfg.inject_failure);
  return report;
}

}  // namespace tdirac
