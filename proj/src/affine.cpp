#include "tdirac/affine.hpp"

#include <algorithm>
#include <cmath>

#include "tdirac/calculus.hpp"
#include "tdirac/errors.hpp"

namespace tdirac {

namespace {

constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

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

Rank3 add(const Rank3& a, const Rank3& b) {
  Rank3 out;
  for (int l = 0; l < 4; ++l) out[l] = a[l] + b[l];
  return out;
}

// b_{abm} (flat 16 a + 4 b + m) -> lowered K_{amb} = -2 b_{abm}.
Rank3 contorsion_from_b_components(const std::array<double, 64>& b) {
  Rank3 k = zero_rank3();
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int m = 0; m < 4; ++m) k[a](m, c) = -2.0 * b[16 * a + 4 * c + m];
  return k;
}

std::array<double, 64> b_components_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 64) throw ConfigError("contorsion: b must be an array of 64 numbers");
  std::array<double, 64> b{};
  for (int i = 0; i < 64; ++i) {
    if (!j[i].is_number()) throw ConfigError("contorsion: b entries must be numbers");
    b[i] = j[i].get<double>();
  }
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int m = 0; m < 4; ++m)
        if (std::abs(b[16 * a + 4 * c + m] + b[16 * c + 4 * a + m]) > 1e-12)
          throw IncompatibleContorsion("contorsion: b_{abm} is not antisymmetric in a, b");
  return b;
}

std::vector<Point> probe_points(const ChartBox& box) {
  std::vector<Point> pts;
  for (double t : {0.25, 0.5, 0.75}) pts.push_back(box.lo + t * (box.hi - box.lo));
  return pts;
}

}  // namespace

// --- ContorsionField -----------------------------------------------------------

ContorsionField::ContorsionField(LowerFn lower, const std::vector<Point>& probes, bool exact)
    : lower_(std::move(lower)), exact_(exact) {
  for (const Point& x : probes) require_compatible(lower_(x));
}

ContorsionField ContorsionField::zero() {
  return ContorsionField([](const Point&) { return zero_rank3(); }, {});
}

Rank3 ContorsionField::mixed(const Point& x, const MetricField& mf) const {
  return raise_first(lower_(x), mf.at(x).ginv());
}

double compatibility_defect(const Rank3& lower) {
  double out = 0.0;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) out = std::max(out, std::abs(lower[n](m, l) + lower[l](m, n)));
  return out;
}

void require_compatible(const Rank3& lower, double tol) {
  const double d = compatibility_defect(lower);
  if (d > tol * std::max(1.0, max_abs(lower)))
    throw IncompatibleContorsion("contorsion is not metric compatible: max |K_nml + K_lmn| = " + std::to_string(d));
}

Rank3 raise_first(const Rank3& lower, const Eigen::Matrix4d& ginv) {
  Rank3 out = zero_rank3();
  for (int l = 0; l < 4; ++l)
    for (int k = 0; k < 4; ++k) out[l] += ginv(l, k) * lower[k];
  return out;
}

Rank3 lower_first(const Rank3& mixed, const Eigen::Matrix4d& g) { return raise_first(mixed, g); }

// --- dictionary ----------------------------------------------------------------

std::array<Multivectord, 4> b_from_contorsion(const Rank3& lower) {
  require_compatible(lower);
  std::array<Multivectord, 4> out;
  for (int mu = 0; mu < 4; ++mu)
    for (const auto& [a, b] : kPairs) out[mu] += (-0.5 * lower[a](mu, b)) * Multivectord::basis({a, b});
  return out;
}

std::array<Multivectord, 4> b_from_contorsion(const ContorsionField& k, const Point& x) {
  return b_from_contorsion(k.lower(x));
}

GaugeField gauge_field_from_contorsion(const ContorsionField& k) {
  GaugeField out;
  for (int mu = 0; mu < 4; ++mu)
    out[mu] = MultivectorField([k, mu](const Point& x) { return b_from_contorsion(k, x)[mu]; }, {}, k.exact());
  return out;
}

Rank3 contorsion_from_b(const std::array<Multivectord, 4>& b) {
  Rank3 k = zero_rank3();
  for (int mu = 0; mu < 4; ++mu) {
    if (b[mu].leakage_outside(2) > 1e-12 * std::max(1.0, b[mu].norm_inf())) throw GradeError("contorsion_from_b: B_mu must be a pure 2-form");
    for (const auto& [a, c] : kPairs) {
      const double v = b[mu][BladeIndex{static_cast<std::uint8_t>((1u << a) | (1u << c))}];
      k[a](mu, c) = -2.0 * v;
      k[c](mu, a) = 2.0 * v;
    }
  }
  return k;
}

ContorsionField contorsion_field_from_gauge(const GaugeField& b, const std::vector<Point>& probes) {
  bool exact = true;
  for (const auto& f : b) exact = exact && f.exact();
  return ContorsionField(
      [b](const Point& x) {
        std::array<Multivectord, 4> v;
        for (int mu = 0; mu < 4; ++mu) v[mu] = b[mu](x);
        return contorsion_from_b(v);
      },
      probes, exact);
}

Rank3 contorsion_from_commutators(const std::array<Multivectord, 4>& b, const MetricAtPointd& m) {
  Rank3 out = zero_rank3();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const Eigen::Vector4d c = commutator(b[mu], Multivectord::basis({nu}), m).vector_part();
      for (int l = 0; l < 4; ++l) out[nu](mu, l) = c[l];
    }
  return out;
}

Rank3 torsion_from_contorsion(const Rank3& mixed) {
  Rank3 out;
  for (int l = 0; l < 4; ++l) out[l] = mixed[l] - mixed[l].transpose();
  return out;
}

Rank3 contorsion_from_torsion(const Rank3& t, const MetricAtPointd& m, double tol) {
  for (int l = 0; l < 4; ++l)
    if ((t[l] + t[l].transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, max_abs(t)))
      throw PreconditionViolation("contorsion_from_torsion: torsion is not antisymmetric in its lower indices");
  const Rank3 tl = lower_first(t, m.g());  // T_{abn}
  Rank3 out = zero_rank3();
  for (int l = 0; l < 4; ++l)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        double v = t[l](mu, nu);
        for (int b = 0; b < 4; ++b) v += m.ginv()(l, b) * (tl[mu](b, nu) + tl[nu](b, mu));
        out[l](mu, nu) = 0.5 * v;
      }
  return out;
}

// --- affine connection -----------------------------------------------------------

Rank3 affine_connection(const ContorsionField& k, const Point& x, const MetricField& mf, double h) {
  return add(christoffel(mf, x, h).gamma, k.mixed(x, mf));
}

Rank4 affine_connection_derivative(const ContorsionField& k, const Point& x, const MetricField& mf, double h) {
  Rank4 out = christoffel_derivative(mf, x, h);
  const double step = h;
  require_stencil(mf.box(), x, step);
  for (int r = 0; r < 4; ++r) {
    Point xp = x;
    Point xm = x;
    xp[r] += step;
    xm[r] -= step;
    const Rank3 kp = k.mixed(xp, mf);
    const Rank3 km = k.mixed(xm, mf);
    for (int l = 0; l < 4; ++l) out[r][l] += (kp[l] - km[l]) / (2.0 * step);
  }
  return out;
}

double affine_metric_defect(const ContorsionField& k, const Point& x, const MetricField& mf, double h) {
  const Eigen::Matrix4d g = mf.at(x).g();
  const MetricGradient dg = mf.gradient(x, h);
  const Rank3 gam = affine_connection(k, x, mf, h);
  double out = 0.0;
  for (int c = 0; c < 4; ++c)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        double v = dg[c](mu, nu);
        for (int l = 0; l < 4; ++l) v -= gam[l](c, mu) * g(l, nu) + gam[l](c, nu) * g(mu, l);
        out = std::max(out, std::abs(v));
      }
  return out;
}

Multivectord affine_derivative_residual(const MultivectorField& u, const ContorsionField& k, const Point& x,
                                        const MetricField& mf, int mu, double h) {
  const Multivectord lhs = upsilon_with_connection(u, mu, x, affine_connection(k, x, mf, h), mf.box(), h);
  const Multivectord bmu = b_from_contorsion(k, x)[mu];
  return lhs - (upsilon_leibniz(u, mu, x, mf, h) - commutator(bmu, u(x), mf.at(x)));
}

Rank4 affine_curvature(const ContorsionField& k, const Point& x, const MetricField& mf, double h) {
  const Rank4 mixed = curvature_from_connection(affine_connection(k, x, mf, h), affine_connection_derivative(k, x, mf, h));
  const Eigen::Matrix4d g = mf.at(x).g();
  Rank4 out = zero_rank4();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) out[a][b] += g(c, a) * mixed[c][b];
  return out;
}

FlatnessCheck flatness_check(const ContorsionField& k, const Point& x, const MetricField& mf, double h) {
  FlatnessCheck out;
  out.q = zero_rank4();
  const GaugeField b = gauge_field_from_contorsion(k);
  const MetricAtPointd m = mf.at(x);
  const CurvatureAtPoint r = riemann(mf, x, h);
  std::array<std::array<Multivectord, 4>, 4> ups;
  std::array<Multivectord, 4> bv;
  for (int mu = 0; mu < 4; ++mu) {
    bv[mu] = b[mu](x);
    for (int nu = 0; nu < 4; ++nu) ups[mu][nu] = upsilon_leibniz(b[nu], mu, x, mf, h);
  }
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const Multivectord res = ups[mu][nu] - ups[nu][mu] - commutator(bv[mu], bv[nu], m) - 0.5 * r.c2form[mu][nu];
      for (const auto& [a, c] : kPairs) {
        const double v = res[BladeIndex{static_cast<std::uint8_t>((1u << a) | (1u << c))}];
        out.q[a][c](mu, nu) = v;
        out.q[c][a](mu, nu) = -v;
      }
    }
  out.rcheck = affine_curvature(k, x, mf, h);
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      out.residual = std::max(out.residual, (out.rcheck[a][c] + 2.0 * out.q[a][c]).cwiseAbs().maxCoeff());
  out.scale = std::max(max_abs(out.q), max_abs(out.rcheck));
  return out;
}

PureGauge spin_pure_gauge_b(const GaugeElement& u, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  if ((m.g() - MetricAtPointd::minkowski().g()).cwiseAbs().maxCoeff() > 1e-12)
    throw PreconditionViolation("spin_pure_gauge_b: the metric is not Minkowski at x");
  u.require_spin(mf, {x});
  PureGauge out;
  const Multivectord uinv = reversion(u(x));
  for (int mu = 0; mu < 4; ++mu) {
    const Multivectord full = -1.0 * clifford_mul(uinv, u.field().partial(mu, x, mf.box(), h), m);
    out.leakage = std::max(out.leakage, full.leakage_outside(2));
    out.b[mu] = grade_project(full, 2);
  }
  return out;
}

ContorsionField random_contorsion(Rng& rng, const ChartBox& box, double amplitude, double wavenumber) {
  struct Term {
    double c0;
    std::array<double, 2> amp;
    std::array<Eigen::Vector4d, 2> k;
    std::array<double, 2> phase;
  };
  std::array<Term, 24> terms;
  for (Term& t : terms) {
    t.c0 = rng.uniform(-amplitude, amplitude);
    for (int j = 0; j < 2; ++j) {
      t.amp[j] = rng.uniform(-amplitude, amplitude);
      for (int c = 0; c < 4; ++c) t.k[j][c] = rng.uniform(-wavenumber, wavenumber);
      t.phase[j] = rng.uniform(0.0, 6.283185307179586);
    }
  }
  return ContorsionField(
      [terms](const Point& x) {
        Rank3 k = zero_rank3();
        for (int mu = 0; mu < 4; ++mu)
          for (int p = 0; p < 6; ++p) {
            const Term& t = terms[6 * mu + p];
            double v = t.c0;
            for (int j = 0; j < 2; ++j) v += t.amp[j] * std::sin(t.k[j].dot(x) + t.phase[j]);
            const auto [a, c] = kPairs[p];
            k[a](mu, c) = -2.0 * v;
            k[c](mu, a) = 2.0 * v;
          }
        return k;
      },
      probe_points(box));
}

ContorsionField contorsion_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("b")) throw ConfigError("contorsion: expected an object with key 'b'");
  const Json& b = j.at("b");
  if (!j.contains("box")) {
    const Rank3 k = contorsion_from_b_components(b_components_from_json(b));
    return ContorsionField([k](const Point&) { return k; }, {Point::Zero()});
  }
  const ChartBox box = chart_box_from_json(j.at("box"));
  const std::size_t expected = static_cast<std::size_t>(box.n[0] * box.n[1] * box.n[2] * box.n[3]);
  if (!b.is_array() || b.size() != expected)
    throw ConfigError("contorsion: number of b samples does not match the box grid");
  std::vector<Rank3> samples;
  samples.reserve(expected);
  for (const Json& node : b) samples.push_back(contorsion_from_b_components(b_components_from_json(node)));
  return ContorsionField(
      [box, samples](const Point& x) {
        Rank3 k = zero_rank3();
        for (const auto& [node, w] : grid_weights(box, x))
          for (int l = 0; l < 4; ++l) k[l] += w * samples[node][l];
        return k;
      },
      probe_points(box));
}

ContorsionField load_contorsion(const std::string& path) { return contorsion_from_json(read_json_file(path)); }

}  // namespace tdirac
