#include "tdirac/field.hpp"

#include <cmath>
#include <vector>

namespace tdirac {

MultivectorField::MultivectorField()
    : eval_([](const Point&) { return Multivectord(); }), partials_([](const Point&) { return Partials{}; }) {}

MultivectorField::MultivectorField(EvalFn eval, PartialsFn partials, bool exact)
    : eval_(std::move(eval)), partials_(std::move(partials)), exact_(exact) {}

MultivectorField MultivectorField::constant(const Multivectord& value) {
  return MultivectorField([value](const Point&) { return value; }, [](const Point&) { return Partials{}; });
}

double MultivectorField::fd_step(double h) const { return h; }

Partials MultivectorField::partials(const Point& x, const ChartBox& box, double h) const {
  if (partials_) return partials_(x);
  const double step = fd_step(h);
  require_stencil(box, x, step);
  Partials out;
  for (int mu = 0; mu < 4; ++mu) {
    Point xp = x;
    Point xm = x;
    xp[mu] += step;
    xm[mu] -= step;
    out[mu] = (eval_(xp) - eval_(xm)) / (2.0 * step);
  }
  return out;
}

Multivectord MultivectorField::partial(int mu, const Point& x, const ChartBox& box, double h) const {
  if (partials_) return partials_(x)[mu];
  const double step = fd_step(h);
  require_stencil(box, x, step);
  Point xp = x;
  Point xm = x;
  xp[mu] += step;
  xm[mu] -= step;
  return (eval_(xp) - eval_(xm)) / (2.0 * step);
}

namespace {

template <typename Combine>
MultivectorField::PartialsFn combine_partials(const MultivectorField& a, const MultivectorField& b, Combine f) {
  if (!a.has_analytic_partials() || !b.has_analytic_partials()) return {};
  auto pa = a.partials_fn();
  auto pb = b.partials_fn();
  return [pa, pb, f](const Point& x) {
    const Partials da = pa(x);
    const Partials db = pb(x);
    Partials out;
    for (int mu = 0; mu < 4; ++mu) out[mu] = f(da[mu], db[mu]);
    return out;
  };
}

}  // namespace

MultivectorField operator+(const MultivectorField& a, const MultivectorField& b) {
  auto ea = a.eval_fn();
  auto eb = b.eval_fn();
  return MultivectorField([ea, eb](const Point& x) { return ea(x) + eb(x); },
                          combine_partials(a, b, [](const Multivectord& u, const Multivectord& v) { return u + v; }),
                          a.exact() && b.exact());
}

MultivectorField operator-(const MultivectorField& a, const MultivectorField& b) {
  auto ea = a.eval_fn();
  auto eb = b.eval_fn();
  return MultivectorField([ea, eb](const Point& x) { return ea(x) - eb(x); },
                          combine_partials(a, b, [](const Multivectord& u, const Multivectord& v) { return u - v; }),
                          a.exact() && b.exact());
}

MultivectorField operator*(double s, const MultivectorField& a) {
  auto ea = a.eval_fn();
  MultivectorField::PartialsFn p;
  if (a.has_analytic_partials()) {
    auto pa = a.partials_fn();
    p = [pa, s](const Point& x) {
      Partials d = pa(x);
      for (auto& v : d) v *= s;
      return d;
    };
  }
  return MultivectorField([ea, s](const Point& x) { return s * ea(x); }, p, a.exact());
}

MultivectorField scalar_times(const ScalarField& f, const MultivectorField& u) {
  auto ef = f.eval_fn();
  auto eu = u.eval_fn();
  MultivectorField::PartialsFn p;
  if (f.has_analytic_partials() && u.has_analytic_partials()) {
    auto pf = f.partials_fn();
    auto pu = u.partials_fn();
    p = [ef, eu, pf, pu](const Point& x) {
      const double fv = ef(x).scalar_part();
      const Multivectord uv = eu(x);
      const Partials df = pf(x);
      const Partials du = pu(x);
      Partials out;
      for (int mu = 0; mu < 4; ++mu) out[mu] = df[mu].scalar_part() * uv + fv * du[mu];
      return out;
    };
  }
  return MultivectorField([ef, eu](const Point& x) { return ef(x).scalar_part() * eu(x); }, p,
                          f.exact() && u.exact());
}

MultivectorField product(const MultivectorField& a, const MultivectorField& b, const MetricField& mf) {
  auto ea = a.eval_fn();
  auto eb = b.eval_fn();
  const MetricField metric = mf;
  MultivectorField::PartialsFn p;
  if (mf.is_constant() && a.has_analytic_partials() && b.has_analytic_partials()) {
    auto pa = a.partials_fn();
    auto pb = b.partials_fn();
    p = [ea, eb, pa, pb, metric](const Point& x) {
      const MetricAtPointd m = metric.at(x);
      const Multivectord av = ea(x);
      const Multivectord bv = eb(x);
      const Partials da = pa(x);
      const Partials db = pb(x);
      Partials out;
      for (int mu = 0; mu < 4; ++mu) out[mu] = clifford_mul(da[mu], bv, m) + clifford_mul(av, db[mu], m);
      return out;
    };
  }
  return MultivectorField([ea, eb, metric](const Point& x) { return clifford_mul(ea(x), eb(x), metric.at(x)); }, p,
                          a.exact() && b.exact());
}

MultivectorField reversion(const MultivectorField& a) {
  auto ea = a.eval_fn();
  MultivectorField::PartialsFn p;
  if (a.has_analytic_partials()) {
    auto pa = a.partials_fn();
    p = [pa](const Point& x) {
      Partials d = pa(x);
      for (auto& v : d) v = reversion(v);
      return d;
    };
  }
  return MultivectorField([ea](const Point& x) { return reversion(ea(x)); }, p, a.exact());
}

MultivectorField hodge_star(const MultivectorField& a, const MetricField& mf) {
  auto ea = a.eval_fn();
  const MetricField metric = mf;
  MultivectorField::PartialsFn p;
  if (mf.is_constant() && a.has_analytic_partials()) {
    auto pa = a.partials_fn();
    p = [pa, metric](const Point& x) {
      const MetricAtPointd m = metric.at(x);
      Partials d = pa(x);
      for (auto& v : d) v = hodge_star(v, m);
      return d;
    };
  }
  return MultivectorField([ea, metric](const Point& x) { return hodge_star(ea(x), metric.at(x)); }, p, a.exact());
}

MultivectorField grade_project(const MultivectorField& a, int k) {
  auto ea = a.eval_fn();
  MultivectorField::PartialsFn p;
  if (a.has_analytic_partials()) {
    auto pa = a.partials_fn();
    p = [pa, k](const Point& x) {
      Partials d = pa(x);
      for (auto& v : d) v = grade_project(v, k);
      return d;
    };
  }
  return MultivectorField([ea, k](const Point& x) { return grade_project(ea(x), k); }, p, a.exact());
}

namespace {

struct SineTerm {
  Eigen::Vector4d k;
  double amplitude;
  double phase;
};

struct SmoothCoefficient {
  int index;
  double offset;
  std::vector<SineTerm> terms;
};

}  // namespace

MultivectorField random_smooth_field(Rng& rng, std::initializer_list<int> grades, double amplitude,
                                     double wavenumber) {
  std::vector<SmoothCoefficient> coeffs;
  for (int g : grades)
    for (int i = grade_begin(g); i < grade_end(g); ++i) {
      SmoothCoefficient c{i, rng.uniform(-amplitude, amplitude), {}};
      for (int j = 0; j < 2; ++j) {
        SineTerm t;
        for (int mu = 0; mu < 4; ++mu) t.k[mu] = rng.uniform(-wavenumber, wavenumber);
        t.amplitude = rng.uniform(-amplitude, amplitude);
        t.phase = rng.uniform(0.0, 6.283185307179586);
        c.terms.push_back(t);
      }
      coeffs.push_back(c);
    }
  auto eval = [coeffs](const Point& x) {
    Multivectord out;
    for (const auto& c : coeffs) {
      double v = c.offset;
      for (const auto& t : c.terms) v += t.amplitude * std::sin(t.k.dot(x) + t.phase);
      out[c.index] = v;
    }
    return out;
  };
  auto partials = [coeffs](const Point& x) {
    Partials out;
    for (const auto& c : coeffs)
      for (const auto& t : c.terms) {
        const double cs = t.amplitude * std::cos(t.k.dot(x) + t.phase);
        for (int mu = 0; mu < 4; ++mu) out[mu][c.index] += cs * t.k[mu];
      }
    return out;
  };
  return MultivectorField(eval, partials);
}

MultivectorField random_quadratic_field(Rng& rng, std::initializer_list<int> grades, double amplitude) {
  struct Quadratic {
    int index;
    double c0;
    Eigen::Vector4d lin;
    Eigen::Matrix4d quad;  // symmetric
  };
  std::vector<Quadratic> coeffs;
  for (int g : grades)
    for (int i = grade_begin(g); i < grade_end(g); ++i) {
      Quadratic q{i, rng.uniform(-amplitude, amplitude), {}, {}};
      for (int mu = 0; mu < 4; ++mu) q.lin[mu] = rng.uniform(-amplitude, amplitude);
      Eigen::Matrix4d a;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = rng.uniform(-amplitude, amplitude);
      q.quad = 0.25 * (a + a.transpose());
      coeffs.push_back(q);
    }
  auto eval = [coeffs](const Point& x) {
    Multivectord out;
    for (const auto& q : coeffs) out[q.index] = q.c0 + q.lin.dot(x) + x.dot(q.quad * x);
    return out;
  };
  auto partials = [coeffs](const Point& x) {
    Partials out;
    for (const auto& q : coeffs) {
      const Eigen::Vector4d d = q.lin + 2.0 * q.quad * x;
      for (int mu = 0; mu < 4; ++mu) out[mu][q.index] = d[mu];
    }
    return out;
  };
  return MultivectorField(eval, partials);
}

ScalarField random_scalar_field(Rng& rng, double amplitude, double wavenumber) {
  return random_smooth_field(rng, {0}, amplitude, wavenumber);
}

}  // namespace tdirac
