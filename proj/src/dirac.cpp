#include "tdirac/dirac.hpp"

#include <algorithm>
#include <cmath>

#include "tdirac/errors.hpp"
#include "tdirac/frame.hpp"
#include "tdirac/tolerance.hpp"

namespace tdirac {

namespace {

Multivectord mul(const Multivectord& a, const Multivectord& b, const MetricAtPointd& m) { return clifford_mul(a, b, m); }

Multivectord dx(int mu) { return Multivectord::basis({mu}); }

bool derived_exact(const MultivectorField& u, const MetricField& mf) {
  return u.exact() && u.has_analytic_partials() && mf.has_analytic_gradient();
}

double max_norm(const std::array<Multivectord, 4>& a) {
  double out = 0.0;
  for (const auto& u : a) out = std::max(out, u.norm_inf());
  return out;
}

// dx^mu (Y_mu Psi + Psi I a_mu + Psi B_mu) + m Psi H I
Multivectord first_line(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const Multivectord psi = st.psi(x);
  const Multivectord i = st.i(x);
  const Multivectord psi_i = mul(psi, i, m);
  Multivectord out = st.m * mul(mul(psi, st.h(x), m), i, m);
  for (int mu = 0; mu < 4; ++mu) {
    const Multivectord inner =
        upsilon_leibniz(st.psi, mu, x, mf, h) + st.a[mu](x).scalar_part() * psi_i + mul(psi, st.b[mu](x), m);
    out += mul(dx(mu), inner, m);
  }
  return out;
}

ConstraintResiduals constraints(const MultivectorField& hf, const MultivectorField& iF, const GaugeField& b,
                                const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const Multivectord hv = hf(x);
  const Multivectord iv = iF(x);
  ConstraintResiduals out;
  for (int mu = 0; mu < 4; ++mu) {
    const Multivectord bm = b[mu](x);
    out.upsilon_h[mu] = upsilon_leibniz(hf, mu, x, mf, h) - commutator(bm, hv, m);
    out.upsilon_i[mu] = upsilon_leibniz(iF, mu, x, mf, h) - commutator(bm, iv, m);
  }
  out.h_squared = mul(hv, hv, m) - Multivectord::scalar(1.0);
  out.i_squared = mul(iv, iv, m) + Multivectord::scalar(1.0);
  out.h_i_commutator = commutator(hv, iv, m);
  return out;
}

// d_mu lambda as a scalar field.
ScalarField partial_field(const ScalarField& f, int mu, const MetricField& mf, double h) {
  if (f.has_analytic_partials()) {
    auto pf = f.partials_fn();
    return ScalarField([pf, mu](const Point& x) { return pf(x)[mu]; });
  }
  const ChartBox box = mf.box();
  return ScalarField([f, mu, box, h](const Point& x) { return f.partial(mu, x, box, h); }, {}, false);
}

std::vector<Point> probe_points(const ChartBox& box) {
  std::vector<Point> pts;
  for (double t : {0.3, 0.5, 0.7}) pts.push_back(box.lo + t * (box.hi - box.lo));
  Point p = box.lo;
  for (int k = 0; k < 4; ++k) p[k] += (k % 2 ? 0.35 : 0.65) * (box.hi[k] - box.lo[k]);
  pts.push_back(p);
  return pts;
}

}  // namespace

DiracState DiracState::vacuum(double m) {
  DiracState st;
  st.psi = MultivectorField::constant(Multivectord());
  st.h = MultivectorField::constant(Multivectord::basis({0}));
  st.i = MultivectorField::constant(Multivectord::basis({1, 2}));
  for (int mu = 0; mu < 4; ++mu) {
    st.a[mu] = MultivectorField::constant(Multivectord());
    st.b[mu] = MultivectorField::constant(Multivectord());
  }
  st.m = m;
  return st;
}

GaugeElement GaugeElement::identity() { return GaugeElement(MultivectorField::constant(Multivectord::scalar(1.0))); }

void GaugeElement::require_spin(const MetricField& mf, const std::vector<Point>& points, double tol) const {
  for (const Point& x : points) {
    const Multivectord s = s_(x);
    if (!is_spin(s, mf.at(x), tol * std::max(1.0, s.norm_inf() * s.norm_inf())))
      throw NotSpin("gauge element is not in Spin at x = (" + std::to_string(x[0]) + ", " + std::to_string(x[1]) +
                    ", " + std::to_string(x[2]) + ", " + std::to_string(x[3]) + ")");
  }
}

double ConstraintResiduals::max_abs() const {
  return std::max({max_norm(upsilon_h), max_norm(upsilon_i), h_squared.norm_inf(), i_squared.norm_inf(),
                   h_i_commutator.norm_inf()});
}

MainResidual residual_main(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  return {first_line(st, x, mf, h), constraints(st.h, st.i, st.b, x, mf, h)};
}

Multivectord residual_bg(const GaugeField& b, const Point& x, const MetricField& mf, int mu, int nu, double h) {
  const MetricAtPointd m = mf.at(x);
  const CurvatureAtPoint r = riemann(mf, x, h);
  return upsilon_leibniz(b[nu], mu, x, mf, h) - upsilon_leibniz(b[mu], nu, x, mf, h) -
         commutator(b[mu](x), b[nu](x), m) - 0.5 * r.c2form[mu][nu];
}

Multivectord parallel_residual(const MultivectorField& u, const GaugeField& b, int mu, const Point& x,
                               const MetricField& mf, double h) {
  return upsilon_leibniz(u, mu, x, mf, h) - commutator(b[mu](x), u(x), mf.at(x));
}

// --- gauge transformations ---------------------------------------------------

MultivectorField u1_element(const ScalarField& lambda, const MultivectorField& i, const MetricField& mf) {
  (void)mf;
  auto el = lambda.eval_fn();
  auto ei = i.eval_fn();
  MultivectorField::PartialsFn partials;
  if (lambda.has_analytic_partials() && i.has_analytic_partials()) {
    auto pl = lambda.partials_fn();
    auto pi = i.partials_fn();
    partials = [el, ei, pl, pi](const Point& x) {
      const double l = el(x).scalar_part();
      const Multivectord iv = ei(x);
      const Partials dl = pl(x);
      const Partials di = pi(x);
      Partials out;
      for (int mu = 0; mu < 4; ++mu) {
        const double d = dl[mu].scalar_part();
        out[mu] = Multivectord::scalar(-std::sin(l) * d) + (std::cos(l) * d) * iv + std::sin(l) * di[mu];
      }
      return out;
    };
  }
  return MultivectorField(
      [el, ei](const Point& x) {
        const double l = el(x).scalar_part();
        return Multivectord::scalar(std::cos(l)) + std::sin(l) * ei(x);
      },
      partials, lambda.exact() && i.exact());
}

DiracState gauge_u1(const DiracState& st, const ScalarField& lambda, const MetricField& mf, double h) {
  DiracState out = st;
  out.psi = product(st.psi, u1_element(lambda, st.i, mf), mf);
  for (int mu = 0; mu < 4; ++mu) out.a[mu] = st.a[mu] - partial_field(lambda, mu, mf, h);
  return out;
}

DiracState gauge_spin(const DiracState& st, const GaugeElement& s, const MetricField& mf, double h) {
  const MultivectorField& sf = s.field();
  const MultivectorField sinv = reversion(sf);
  DiracState out = st;
  out.psi = product(st.psi, sf, mf);
  out.h = product(product(sinv, st.h, mf), sf, mf);
  out.i = product(product(sinv, st.i, mf), sf, mf);
  const bool exact = derived_exact(sf, mf);
  const MetricField metric = mf;
  for (int mu = 0; mu < 4; ++mu) {
    const MultivectorField bmu = st.b[mu];
    out.b[mu] = MultivectorField(
        [sf, bmu, metric, mu, h](const Point& x) {
          const MetricAtPointd m = metric.at(x);
          const Multivectord sv = sf(x);
          const Multivectord si = reversion(sv);
          const Multivectord ups = upsilon_leibniz(sf, mu, x, metric, h);
          return grade_project(mul(mul(si, bmu(x), m), sv, m) - mul(si, ups, m), 2);
        },
        {}, exact && bmu.exact());
  }
  return out;
}

MaxwellState gauge_u1(const MaxwellState& ms, const ScalarField& lambda, const MetricField& mf, double h) {
  MaxwellState out = ms;
  const ChartBox box = mf.box();
  const bool exact = lambda.exact() && lambda.has_analytic_partials();
  out.a = ms.a - MultivectorField(
                     [lambda, box, h](const Point& x) {
                       const Partials d = lambda.partials(x, box, h);
                       Eigen::Vector4d v;
                       for (int mu = 0; mu < 4; ++mu) v[mu] = d[mu].scalar_part();
                       return Multivectord::vector(v);
                     },
                     {}, exact);
  return out;
}

// --- conjugation, current, Lagrangian ---------------------------------------

Multivectord dirac_form(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  return mul(reversion(st.psi(x)), first_line(st, x, mf, h), mf.at(x));
}

Multivectord conjugate_lemma_check(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const Multivectord lbar = mul(st.h(x), reversion(dirac_form(st, x, mf, h)), m);

  const MultivectorField psibar_f = product(st.h, reversion(st.psi), mf);
  const Multivectord psibar = psibar_f(x);
  const Multivectord iv = st.i(x);
  Multivectord inner = -st.m * mul(mul(iv, st.h(x), m), psibar, m);
  for (int mu = 0; mu < 4; ++mu) {
    const Multivectord term = upsilon_leibniz(psibar_f, mu, x, mf, h) -
                              st.a[mu](x).scalar_part() * mul(iv, psibar, m) - mul(st.b[mu](x), psibar, m);
    inner += mul(term, dx(mu), m);
  }
  return lbar - mul(inner, st.psi(x), m);
}

Multivectord current_form(const DiracState& st, const Point& x, const MetricField& mf) {
  const MetricAtPointd m = mf.at(x);
  const Multivectord psi = st.psi(x);
  return grade_project(mul(mul(psi, st.h(x), m), reversion(psi), m), 1);
}

MultivectorField current_field(const DiracState& st, const MetricField& mf) {
  const MultivectorField psi = st.psi;
  return grade_project(product(product(psi, st.h, mf), reversion(psi), mf), 1);
}

Eigen::Vector4d current(const DiracState& st, const Point& x, const MetricField& mf) {
  const MetricAtPointd m = mf.at(x);
  const Multivectord psi = st.psi(x);
  const Multivectord psibar = mul(st.h(x), reversion(psi), m);
  Eigen::Vector4d j;
  for (int mu = 0; mu < 4; ++mu) j[mu] = trace(mul(mul(psibar, dx(mu), m), psi, m));
  return j;
}

ConservationResult conservation_residual(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  ConservationResult out;
  const MetricAtPointd m = mf.at(x);
  const double step = h;
  require_stencil(mf.box(), x, step);
  for (int mu = 0; mu < 4; ++mu) {
    Point xp = x;
    Point xm = x;
    xp[mu] += step;
    xm[mu] -= step;
    const double fp = mf.at(xp).sqrt_neg_det() * current(st, xp, mf)[mu];
    const double fm = mf.at(xm).sqrt_neg_det() * current(st, xm, mf)[mu];
    out.divergence += (fp - fm) / (2.0 * step);
  }
  const Multivectord l = dirac_form(st, x, mf, h);
  out.trace_term = trace(mul(st.h(x), l + reversion(l), m));
  out.identity_residual = out.trace_term - out.divergence / m.sqrt_neg_det();
  const double psi_norm = st.psi(x).norm_inf();
  out.scale = std::max({l.norm_inf(), psi_norm * psi_norm, std::abs(out.divergence)});
  return out;
}

double lagrangian_density(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const Multivectord l = dirac_form(st, x, mf, h);
  return m.sqrt_neg_det() * trace(mul(mul(st.h(x), l, m), st.i(x), m));
}

double lagrangian_density_expanded(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const Multivectord psi = st.psi(x);
  const Multivectord hv = st.h(x);
  const Multivectord iv = st.i(x);
  const Multivectord psibar = mul(hv, reversion(psi), m);
  const Multivectord psi_i = mul(psi, iv, m);
  Multivectord inner = -st.m * mul(psi, hv, m);
  for (int mu = 0; mu < 4; ++mu) {
    const Multivectord d =
        upsilon_leibniz(st.psi, mu, x, mf, h) + st.a[mu](x).scalar_part() * psi_i + mul(psi, st.b[mu](x), m);
    inner += mul(mul(dx(mu), d, m), iv, m);
  }
  return m.sqrt_neg_det() * trace(mul(psibar, inner, m));
}

// --- Maxwell coupling --------------------------------------------------------

MaxwellResidual maxwell_residual(const MaxwellState& ms, const DiracState& st, const Point& x, const MetricField& mf,
                                 double h) {
  MaxwellResidual out;
  out.da_minus_f = d_op(ms.a, x, mf, h) - ms.f(x);
  out.delta_f_minus_alpha_j = delta_op(ms.f, x, mf, h) - ms.alpha * current_form(st, x, mf);
  out.d_f = d_op(ms.f, x, mf, h);
  out.delta_j = delta_op(current_field(st, mf), x, mf, h);
  return out;
}

MaxwellLagrangian maxwell_lagrangian(const Multivectord& f, const MetricAtPointd& m) {
  MaxwellLagrangian out;
  out.trace_form = m.sqrt_neg_det() * trace(clifford_mul(f, f, m));
  const Eigen::Matrix4d lower = detail::antisymmetric_components(f);
  const Eigen::Matrix4d upper = m.ginv() * lower * m.ginv();
  out.component_form = -0.5 * m.sqrt_neg_det() * (lower.cwiseProduct(upper)).sum();
  return out;
}

Multivectord gauge_covariant_derivative(const MultivectorField& u, const GaugeField& b, int mu, const Point& x,
                                        const MetricField& mf, double h) {
  return parallel_residual(u, b, mu, x, mf, h);
}

double UtResidual::max_abs() const {
  return std::max({first_line.norm_inf(), curvature_line, max_norm(d_h), max_norm(d_i), h_squared.norm_inf(),
                   i_squared.norm_inf(), h_i_commutator.norm_inf(), da_minus_f.norm_inf(),
                   delta_f_minus_alpha_j.norm_inf()});
}

UtResidual residual_ut(const DiracState& st, const MaxwellState& ms, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  UtResidual out;
  const Multivectord psi = st.psi(x);
  const Multivectord hv = st.h(x);
  const Multivectord iv = st.i(x);

  Multivectord big_b;
  Multivectord d_psi;
  for (int mu = 0; mu < 4; ++mu) {
    big_b += mul(dx(mu), st.b[mu](x), m);
    d_psi += mul(dx(mu), gauge_covariant_derivative(st.psi, st.b, mu, x, mf, h), m);
  }
  out.first_line = d_psi + mul(mul(ms.a(x), psi, m), iv, m) + mul(big_b, psi, m) + st.m * mul(mul(psi, hv, m), iv, m);

  const CurvatureAtPoint r = riemann(mf, x, h);
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = mu + 1; nu < 4; ++nu) {
      const Multivectord line = gauge_covariant_derivative(st.b[nu], st.b, mu, x, mf, h) -
                                gauge_covariant_derivative(st.b[mu], st.b, nu, x, mf, h) +
                                commutator(st.b[mu](x), st.b[nu](x), m) - 0.5 * r.c2form[mu][nu];
      out.curvature_line = std::max(out.curvature_line, line.norm_inf());
    }
    out.d_h[mu] = gauge_covariant_derivative(st.h, st.b, mu, x, mf, h);
    out.d_i[mu] = gauge_covariant_derivative(st.i, st.b, mu, x, mf, h);
  }
  out.h_squared = mul(hv, hv, m) - Multivectord::scalar(1.0);
  out.i_squared = mul(iv, iv, m) + Multivectord::scalar(1.0);
  out.h_i_commutator = commutator(hv, iv, m);
  out.da_minus_f = d_op(ms.a, x, mf, h) - ms.f(x);
  out.delta_f_minus_alpha_j = delta_op(ms.f, x, mf, h) - ms.alpha * current_form(st, x, mf);
  return out;
}

// --- Minkowski space ---------------------------------------------------------

Eigen::Matrix<double, 8, 1> even_coefficients(const Multivectord& u) {
  Eigen::Matrix<double, 8, 1> c;
  int k = 0;
  for (int i = 0; i < kBladeCount; ++i)
    if (grade_of(i) % 2 == 0) c[k++] = u[i];
  return c;
}

Multivectord from_even_coefficients(const Eigen::Matrix<double, 8, 1>& c) {
  Multivectord u;
  int k = 0;
  for (int i = 0; i < kBladeCount; ++i)
    if (grade_of(i) % 2 == 0) u[i] = c[k++];
  return u;
}

Eigen::Matrix<double, 8, 8> planewave_matrix(const Eigen::Vector4d& p, double m, const Multivectord& h) {
  const MetricAtPointd eta = MetricAtPointd::minkowski();
  const Multivectord pslash = Multivectord::vector(p);
  Eigen::Matrix<double, 8, 8> mat;
  for (int j = 0; j < 8; ++j) {
    Eigen::Matrix<double, 8, 1> e = Eigen::Matrix<double, 8, 1>::Zero();
    e[j] = 1.0;
    const Multivectord psi0 = from_even_coefficients(e);
    const Multivectord image = mul(pslash, psi0, eta) - m * mul(psi0, h, eta);
    int k = 0;
    for (int i = 0; i < kBladeCount; ++i)
      if (grade_of(i) % 2 == 1) mat(k++, j) = image[i];
  }
  return mat;
}

DiracState planewave_solve(const Eigen::Vector4d& p, double m, int sign) {
  if (sign != 1 && sign != -1) throw PreconditionViolation("planewave_solve: sign must be +1 or -1");
  if (!(m > 0.0)) throw PreconditionViolation("planewave_solve: mass must be positive");
  const MetricAtPointd eta = MetricAtPointd::minkowski();
  const double p2 = p.dot(eta.ginv() * p);
  if (std::abs(p2 - m * m) > 1e-12 * std::max(1.0, m * m))
    throw OffShellMomentum("planewave_solve: p^2 = " + std::to_string(p2) + " but m^2 = " + std::to_string(m * m));

  const Multivectord hv = Multivectord::basis({0});
  const Multivectord iv = Multivectord::basis({1, 2});
  const Eigen::Vector4d sp = static_cast<double>(sign) * p;
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 8>> svd(planewave_matrix(sp, m, hv), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv[0]);
  std::vector<int> null_cols;
  for (int k = 0; k < 8; ++k)
    if (sv[k] <= cutoff) null_cols.push_back(k);
  if (null_cols.empty()) throw NoSolution("planewave_solve: the on-shell system has a trivial null space");

  // Projection of the first canonical even basis vector with a usable
  // component onto the null space.
  Eigen::Matrix<double, 8, Eigen::Dynamic> basis(8, static_cast<int>(null_cols.size()));
  for (std::size_t k = 0; k < null_cols.size(); ++k) basis.col(static_cast<int>(k)) = svd.matrixV().col(null_cols[k]);
  Eigen::Matrix<double, 8, 1> c = Eigen::Matrix<double, 8, 1>::Zero();
  for (int j = 0; j < 8; ++j) {
    Eigen::Matrix<double, 8, 1> e = Eigen::Matrix<double, 8, 1>::Zero();
    e[j] = 1.0;
    c = basis * (basis.transpose() * e);
    if (c.norm() > 1e-6) break;
  }
  c.normalize();
  for (int j = 0; j < 8; ++j) {
    if (std::abs(c[j]) > 1e-12) {
      if (c[j] < 0.0) c = -c;
      break;
    }
  }
  const Multivectord psi0 = from_even_coefficients(c);

  DiracState st = DiracState::vacuum(m);
  const double s = sign;
  st.psi = MultivectorField(
      [psi0, iv, p, s](const Point& x) {
        const MetricAtPointd eta = MetricAtPointd::minkowski();
        const double phase = s * p.dot(x);
        return mul(psi0, Multivectord::scalar(std::cos(phase)) - std::sin(phase) * iv, eta);
      },
      [psi0, iv, p, s](const Point& x) {
        const MetricAtPointd eta = MetricAtPointd::minkowski();
        const double phase = s * p.dot(x);
        const Multivectord psi_i = mul(mul(psi0, Multivectord::scalar(std::cos(phase)) - std::sin(phase) * iv, eta), iv, eta);
        Partials out;
        for (int mu = 0; mu < 4; ++mu) out[mu] = (-s * p[mu]) * psi_i;
        return out;
      });
  return st;
}

GaugeField pure_gauge_b(const GaugeElement& u, const MetricField& mf, double h) {
  const MultivectorField uf = u.field();
  const MetricField metric = mf;
  const bool exact = uf.exact() && uf.has_analytic_partials();
  GaugeField out;
  for (int mu = 0; mu < 4; ++mu) {
    out[mu] = MultivectorField(
        [uf, metric, mu, h](const Point& x) {
          const MetricAtPointd m = metric.at(x);
          return grade_project(-1.0 * mul(reversion(uf(x)), uf.partial(mu, x, metric.box(), h), m), 2);
        },
        {}, exact);
  }
  return out;
}

DiracState minkowski_gauge_fix(const DiracState& st, const GaugeElement& u, const MetricField& mf, double h) {
  if (!mf.is_constant()) throw PreconditionViolation("minkowski_gauge_fix: metric is not constant");
  const std::vector<Point> pts = probe_points(mf.box());
  u.require_spin(mf, pts);
  const GaugeField expected = pure_gauge_b(u, mf, h);
  const TolerancePolicy tol{h};
  for (const Point& x : pts) {
    for (int mu = 0; mu < 4; ++mu) {
      const Multivectord want = expected[mu](x);
      const Multivectord have = st.b[mu](x);
      if (max_abs_diff(want, have) > tol.nested_fd(std::max(want.norm_inf(), have.norm_inf())))
        throw PreconditionViolation("minkowski_gauge_fix: B is not the pure gauge -U^-1 dU of the given U");
    }
  }
  return gauge_spin(st, GaugeElement(reversion(u.field())), mf, h);
}

double TdeResidual::max_abs() const {
  return std::max({first_line.norm_inf(), max_norm(d_h), max_norm(d_i), b_max, h_squared.norm_inf(),
                   i_squared.norm_inf(), h_i_commutator.norm_inf()});
}

TdeResidual residual_tde(const DiracState& st, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const ChartBox& box = mf.box();
  TdeResidual out;
  const Multivectord psi = st.psi(x);
  const Multivectord hv = st.h(x);
  const Multivectord iv = st.i(x);
  const Partials dpsi = st.psi.partials(x, box, h);
  const Multivectord psi_i = mul(psi, iv, m);
  out.first_line = st.m * mul(mul(psi, hv, m), iv, m);
  for (int mu = 0; mu < 4; ++mu) {
    out.first_line += mul(dx(mu), dpsi[mu] + st.a[mu](x).scalar_part() * psi_i, m);
    out.d_h[mu] = st.h.partial(mu, x, box, h);
    out.d_i[mu] = st.i.partial(mu, x, box, h);
    out.b_max = std::max(out.b_max, st.b[mu](x).norm_inf());
  }
  out.h_squared = mul(hv, hv, m) - Multivectord::scalar(1.0);
  out.i_squared = mul(iv, iv, m) + Multivectord::scalar(1.0);
  out.h_i_commutator = commutator(hv, iv, m);
  return out;
}

// --- test states ---------------------------------------------------------------

GaugeElement random_spin_field(Rng& rng, const MetricField& mf, double amplitude) {
  if (mf.is_constant()) {
    const MetricAtPointd m = mf.at(0.5 * (mf.box().lo + mf.box().hi));
    constexpr int kFactors = 3;
    std::array<Multivectord, kFactors> gens;
    std::array<ScalarField, kFactors> angles;
    for (int k = 0; k < kFactors; ++k) {
      gens[k] = random_homogeneous(rng, 2, 1.0);
      angles[k] = random_scalar_field(rng, amplitude, 1.0);
    }
    auto factors = [gens, angles, m](const Point& x) {
      std::array<Multivectord, kFactors> f;
      for (int k = 0; k < kFactors; ++k) f[k] = exp_series(angles[k](x).scalar_part() * gens[k], m);
      return f;
    };
    return GaugeElement(MultivectorField(
        [factors, m](const Point& x) {
          const auto f = factors(x);
          Multivectord s = Multivectord::scalar(1.0);
          for (const auto& fk : f) s = clifford_mul(s, fk, m);
          return s;
        },
        [factors, gens, angles, m](const Point& x) {
          const auto f = factors(x);
          std::array<Partials, kFactors> dth;
          for (int k = 0; k < kFactors; ++k) dth[k] = angles[k].partials_fn()(x);
          Partials out;
          for (int mu = 0; mu < 4; ++mu) {
            for (int k = 0; k < kFactors; ++k) {
              Multivectord term = Multivectord::scalar(1.0);
              for (int j = 0; j < kFactors; ++j) {
                const Multivectord fj =
                    j == k ? dth[k][mu].scalar_part() * clifford_mul(gens[k], f[k], m) : f[j];
                term = clifford_mul(term, fj, m);
              }
              out[mu] += term;
            }
          }
          return out;
        }));
  }
  const MultivectorField gen = random_smooth_field(rng, {2}, amplitude, 1.0);
  const MetricField metric = mf;
  return GaugeElement(MultivectorField([gen, metric](const Point& x) { return exp_series(gen(x), metric.at(x)); }));
}

DiracState random_state(Rng& rng, const MetricField& mf, bool conjugate, double h) {
  DiracState st;
  std::array<MultivectorField, 4> theta;
  for (int a = 0; a < 4; ++a) theta[a] = coframe_field(mf, a);
  if (mf.is_constant()) {
    const Point c = 0.5 * (mf.box().lo + mf.box().hi);
    for (int a = 0; a < 4; ++a) theta[a] = MultivectorField::constant(theta[a](c));
    for (int mu = 0; mu < 4; ++mu) st.b[mu] = MultivectorField::constant(Multivectord());
  } else {
    st.b = coframe_connection(mf, h);
  }
  st.h = theta[0];
  st.i = product(theta[1], theta[2], mf);
  Rng psi_rng = rng.fork("psi");
  st.psi = random_smooth_field(psi_rng, {0, 2, 4}, 1.0, 1.0);
  Rng a_rng = rng.fork("a");
  for (int mu = 0; mu < 4; ++mu) st.a[mu] = random_scalar_field(a_rng, 0.5, 1.0);
  Rng m_rng = rng.fork("mass");
  st.m = m_rng.uniform(0.5, 1.5);
  if (conjugate) {
    Rng s_rng = rng.fork("spin");
    st = gauge_spin(st, random_spin_field(s_rng, mf, 0.6), mf, h);
  }
  return st;
}

}  // namespace tdirac
