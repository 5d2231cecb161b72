#include "tdirac/calculus.hpp"

#include <sstream>

#include "tdirac/errors.hpp"

namespace tdirac {

namespace {

std::size_t pow4(int k) { return std::size_t{1} << (2 * k); }

// Basis blade for an arbitrary index sequence (sign applied, zero on repeats).
Multivectord basis_seq(const std::vector<int>& seq) {
  const int sign = permutation_sign(seq);
  Multivectord out;
  if (sign == 0) return out;
  unsigned mask = 0;
  for (int i : seq) mask |= 1u << i;
  out[canonical_index(mask)] = sign;
  return out;
}

// Antisymmetric component u_{n1...nk} of a grade-k part, read from the
// canonical coefficient with the sign of the reordering.
double component(const Multivectord& u, const std::vector<int>& seq) {
  const int sign = permutation_sign(seq);
  if (sign == 0) return 0.0;
  unsigned mask = 0;
  for (int i : seq) mask |= 1u << i;
  return sign * u[canonical_index(mask)];
}

bool derived_exact(const MultivectorField& u, const MetricField& mf) {
  return u.exact() && u.has_analytic_partials() && mf.has_analytic_gradient();
}

}  // namespace

// --- IndexedField ------------------------------------------------------------

IndexedField::IndexedField(int r, int s, std::vector<MultivectorField> entries)
    : r_(r), s_(s), entries_(std::move(entries)) {
  if (r < 0 || s < 0) throw PreconditionViolation("tensor ranks must be nonnegative");
  if (entries_.size() != pow4(r + s)) {
    std::ostringstream os;
    os << "rank (" << r << ", " << s << ") tensor needs " << pow4(r + s) << " entries, got " << entries_.size();
    throw PreconditionViolation(os.str());
  }
}

IndexedField IndexedField::scalar(MultivectorField f) { return IndexedField(0, 0, {std::move(f)}); }

std::size_t IndexedField::flat(const MultiIndex& index) {
  std::size_t out = 0;
  for (int i : index) {
    if (i < 0 || i > 3) throw PreconditionViolation("tensor index out of range");
    out = 4 * out + static_cast<std::size_t>(i);
  }
  return out;
}

MultiIndex IndexedField::unflat(std::size_t i, int rank) {
  MultiIndex out(rank);
  for (int k = rank - 1; k >= 0; --k) {
    out[k] = static_cast<int>(i % 4);
    i /= 4;
  }
  return out;
}

const MultivectorField& IndexedField::at(const MultiIndex& index) const {
  if (static_cast<int>(index.size()) != rank()) throw PreconditionViolation("multi-index length must equal r + s");
  return entries_[flat(index)];
}

IndexedValue evaluate(const IndexedField& t, const Point& x) {
  IndexedValue out{t.r(), t.s(), {}};
  out.entries.reserve(t.size());
  for (const auto& e : t.entries()) out.entries.push_back(e(x));
  return out;
}

IndexedField tensor_product(const IndexedField& u, const IndexedField& v) {
  const int r = u.r() + v.r();
  const int s = u.s() + v.s();
  std::vector<MultivectorField> entries;
  entries.reserve(pow4(r + s));
  for (std::size_t i = 0; i < pow4(r + s); ++i) {
    const MultiIndex idx = IndexedField::unflat(i, r + s);
    MultiIndex iu;
    MultiIndex iv;
    iu.insert(iu.end(), idx.begin(), idx.begin() + u.r());
    iv.insert(iv.end(), idx.begin() + u.r(), idx.begin() + r);
    iu.insert(iu.end(), idx.begin() + r, idx.begin() + r + u.s());
    iv.insert(iv.end(), idx.begin() + r + u.s(), idx.end());
    const MultivectorField a = u.at(iu);
    const MultivectorField b = v.at(iv);
    auto ea = a.eval_fn();
    auto eb = b.eval_fn();
    MultivectorField::PartialsFn p;
    if (a.has_analytic_partials() && b.has_analytic_partials()) {
      auto pa = a.partials_fn();
      auto pb = b.partials_fn();
      p = [ea, eb, pa, pb](const Point& x) {
        const Partials da = pa(x);
        const Partials db = pb(x);
        const Multivectord av = ea(x);
        const Multivectord bv = eb(x);
        Partials out;
        for (int mu = 0; mu < 4; ++mu) out[mu] = wedge(da[mu], bv) + wedge(av, db[mu]);
        return out;
      };
    }
    entries.emplace_back([ea, eb](const Point& x) { return wedge(ea(x), eb(x)); }, p, a.exact() && b.exact());
  }
  return IndexedField(r, s, std::move(entries));
}

IndexedField metric_tensor_field(const MetricField& mf, double h) {
  std::vector<MultivectorField> entries;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      const MetricField metric = mf;
      MultivectorField::PartialsFn p;
      if (mf.has_analytic_gradient()) {
        p = [metric, m, n, h](const Point& x) {
          const MetricGradient dg = metric.gradient(x, h);
          Partials out;
          for (int k = 0; k < 4; ++k) out[k] = Multivectord::scalar(dg[k](m, n));
          return out;
        };
      }
      entries.emplace_back([metric, m, n](const Point& x) { return Multivectord::scalar(metric.g_raw(x)(m, n)); }, p);
    }
  return IndexedField(0, 2, std::move(entries));
}

// --- covariant derivative ----------------------------------------------------

namespace detail {

IndexedValue full_covariant_derivative(const IndexedField& t, int sigma, const Point& x, const MetricField& mf,
                                       double h) {
  const ChristoffelAtPoint gam = christoffel(mf, x, h);
  const Eigen::Matrix<double, 16, 16> action = connection_action(gam.gamma, sigma);
  const IndexedValue val = evaluate(t, x);
  const int rank = t.rank();
  IndexedValue out{t.r(), t.s(), std::vector<Multivectord>(t.size())};
  for (std::size_t i = 0; i < t.size(); ++i) {
    Multivectord d = t.at_flat(i).partial(sigma, x, mf.box(), h) + Multivectord(action * val.entries[i].coeffs());
    const MultiIndex idx = IndexedField::unflat(i, rank);
    for (int slot = 0; slot < rank; ++slot) {
      const bool upper = slot < t.r();
      MultiIndex other = idx;
      for (int rho = 0; rho < 4; ++rho) {
        other[slot] = rho;
        const Multivectord& v = val.entries[IndexedField::flat(other)];
        if (upper)
          d += gam(idx[slot], sigma, rho) * v;
        else
          d -= gam(rho, sigma, idx[slot]) * v;
      }
    }
    out.entries[i] = d;
  }
  return out;
}

}  // namespace detail

namespace {

void require_scalar_values(const IndexedValue& v) {
  for (const auto& e : v.entries)
    if (e.leakage_outside(0) > 0.0) throw GradeError("covariant_derivative expects grade-0 tensor components");
}

}  // namespace

IndexedValue covariant_derivative(const IndexedField& t, int mu, const Point& x, const MetricField& mf, double h) {
  require_scalar_values(evaluate(t, x));
  return detail::full_covariant_derivative(t, mu, x, mf, h);
}

Multivectord covariant_derivative(const IndexedField& t, const MultiIndex& index, int mu, const Point& x,
                                  const MetricField& mf, double h) {
  (void)t.at(index);
  return covariant_derivative(t, mu, x, mf, h).entries[IndexedField::flat(index)];
}

// --- Upsilon -----------------------------------------------------------------

Eigen::Matrix<double, 16, 16> connection_action(const Rank3& gamma, int mu) {
  Eigen::Matrix<double, 16, 16> a = Eigen::Matrix<double, 16, 16>::Zero();
  for (int b = 1; b < kBladeCount; ++b) {
    const std::vector<int> idx = indices_of(blade_at(b));
    Multivectord col;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::vector<int> seq = idx;
      for (int lam = 0; lam < 4; ++lam) {
        const double c = gamma[idx[i]](mu, lam);
        if (c == 0.0) continue;
        seq[i] = lam;
        col -= c * basis_seq(seq);
      }
    }
    a.col(b) = col.coeffs();
  }
  return a;
}

Multivectord upsilon_with_connection(const MultivectorField& u, int mu, const Point& x, const Rank3& gamma,
                                     const ChartBox& box, double h) {
  return u.partial(mu, x, box, h) + Multivectord(connection_action(gamma, mu) * u(x).coeffs());
}

Multivectord upsilon_leibniz(const MultivectorField& u, int mu, const Point& x, const MetricField& mf, double h) {
  return upsilon_with_connection(u, mu, x, christoffel(mf, x, h).gamma, mf.box(), h);
}

Multivectord upsilon_components(const MultivectorField& u, int mu, const Point& x, const MetricField& mf,
                                double h) {
  const ChristoffelAtPoint gam = christoffel(mf, x, h);
  const Multivectord val = u(x);
  const Multivectord du = u.partial(mu, x, mf.box(), h);
  Multivectord out;
  out[0] = du[0];
  for (int b = 1; b < kBladeCount; ++b) {
    const std::vector<int> nu = indices_of(blade_at(b));
    // u_{n1..nk;mu} = d_mu u_{n1..nk} - sum_i Gamma^l_{mu n_i} u_{n1..l..nk}
    double c = du[b];
    for (std::size_t i = 0; i < nu.size(); ++i) {
      std::vector<int> seq = nu;
      for (int lam = 0; lam < 4; ++lam) {
        seq[i] = lam;
        c -= gam(lam, mu, nu[i]) * component(val, seq);
      }
    }
    out[b] = c;
  }
  return out;
}

Multivectord d_op(const MultivectorField& u, const Point& x, const MetricField& mf, double h) {
  const Rank3 gamma = christoffel(mf, x, h).gamma;
  Multivectord out;
  for (int mu = 0; mu < 4; ++mu)
    out += wedge(Multivectord::basis({mu}), upsilon_with_connection(u, mu, x, gamma, mf.box(), h));
  return out;
}

Multivectord upsilon_op(const MultivectorField& u, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const Rank3 gamma = christoffel(mf, x, h).gamma;
  Multivectord out;
  for (int mu = 0; mu < 4; ++mu)
    out += clifford_mul(Multivectord::basis({mu}), upsilon_with_connection(u, mu, x, gamma, mf.box(), h), m);
  return out;
}

Multivectord delta_op(const MultivectorField& u, const Point& x, const MetricField& mf, double h) {
  const MetricAtPointd m = mf.at(x);
  const Rank3 gamma = christoffel(mf, x, h).gamma;
  Multivectord out;
  for (int mu = 0; mu < 4; ++mu) {
    const Multivectord e = Multivectord::basis({mu});
    const Multivectord y = upsilon_with_connection(u, mu, x, gamma, mf.box(), h);
    out += wedge(e, y) - clifford_mul(e, y, m);
  }
  return out;
}

MultivectorField upsilon_field(const MultivectorField& u, int mu, const MetricField& mf, double h) {
  const MetricField metric = mf;
  return MultivectorField([u, mu, metric, h](const Point& x) { return upsilon_leibniz(u, mu, x, metric, h); }, {},
                          derived_exact(u, mf));
}

MultivectorField d_field(const MultivectorField& u, const MetricField& mf, double h) {
  const MetricField metric = mf;
  return MultivectorField([u, metric, h](const Point& x) { return d_op(u, x, metric, h); }, {},
                          derived_exact(u, mf));
}

MultivectorField upsilon_op_field(const MultivectorField& u, const MetricField& mf, double h) {
  const MetricField metric = mf;
  return MultivectorField([u, metric, h](const Point& x) { return upsilon_op(u, x, metric, h); }, {},
                          derived_exact(u, mf));
}

MultivectorField delta_field(const MultivectorField& u, const MetricField& mf, double h) {
  const MetricField metric = mf;
  return MultivectorField([u, metric, h](const Point& x) { return delta_op(u, x, metric, h); }, {},
                          derived_exact(u, mf));
}

Multivectord curvature_commutator_check(const MultivectorField& u, const Point& x, const MetricField& mf, int mu,
                                        int nu, double h) {
  const Rank3 gamma = christoffel(mf, x, h).gamma;
  const MultivectorField y_mu = upsilon_field(u, mu, mf, h);
  const MultivectorField y_nu = upsilon_field(u, nu, mf, h);
  const Multivectord lhs = upsilon_with_connection(y_nu, mu, x, gamma, mf.box(), h) -
                           upsilon_with_connection(y_mu, nu, x, gamma, mf.box(), h);
  const CurvatureAtPoint curv = riemann(mf, x, h);
  return lhs - 0.5 * commutator(curv.c2form[mu][nu], u(x), mf.at(x));
}

// --- coordinate changes ------------------------------------------------------

Eigen::Matrix<double, 16, 16> outermorphism(const Eigen::Matrix4d& m) {
  Eigen::Matrix<double, 16, 16> o = Eigen::Matrix<double, 16, 16>::Zero();
  o(0, 0) = 1.0;
  for (int k = 1; k <= 4; ++k)
    for (int a = grade_begin(k); a < grade_end(k); ++a) {
      const std::vector<int> ra = indices_of(blade_at(a));
      for (int b = grade_begin(k); b < grade_end(k); ++b) {
        const std::vector<int> cb = indices_of(blade_at(b));
        Eigen::MatrixXd sub(k, k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) sub(i, j) = m(ra[i], cb[j]);
        o(b, a) = sub.determinant();
      }
    }
  return o;
}

namespace {

// Product of p = J factors on the upper slots and q = J^{-1} factors on the
// lower slots: coefficient of the old component in the new one.
double index_factor(const MultiIndex& new_idx, const MultiIndex& old_idx, int r, const Eigen::Matrix4d& p,
                    const Eigen::Matrix4d& q) {
  double c = 1.0;
  for (std::size_t i = 0; i < new_idx.size() && c != 0.0; ++i)
    c *= static_cast<int>(i) < r ? p(new_idx[i], old_idx[i]) : q(old_idx[i], new_idx[i]);
  return c;
}

std::vector<Multivectord> transform_values(const std::vector<Multivectord>& old_vals, int r, int rank,
                                           const Eigen::Matrix4d& p, const Eigen::Matrix4d& q,
                                           const Eigen::Matrix<double, 16, 16>& o) {
  std::vector<Multivectord> out(old_vals.size());
  for (std::size_t n = 0; n < old_vals.size(); ++n) {
    const MultiIndex ni = IndexedField::unflat(n, rank);
    Multivectord acc;
    for (std::size_t k = 0; k < old_vals.size(); ++k) {
      const double c = index_factor(ni, IndexedField::unflat(k, rank), r, p, q);
      if (c != 0.0) acc += c * old_vals[k];
    }
    out[n] = Multivectord(o * acc.coeffs());
  }
  return out;
}

void require_positive_jacobian(const Eigen::Matrix4d& jacobian) {
  const double det = jacobian.determinant();
  if (!(det > 0.0)) {
    std::ostringstream os;
    os << "coordinate change needs a positive Jacobian determinant, got " << det;
    throw JacobianError(os.str());
  }
}

}  // namespace

IndexedField transform_indexed_field(const IndexedField& t, const Eigen::Matrix4d& jacobian, const Point& shift) {
  require_positive_jacobian(jacobian);
  const Eigen::Matrix4d p = jacobian;
  const Eigen::Matrix4d q = jacobian.inverse();
  const Eigen::Matrix<double, 16, 16> o = outermorphism(q);
  const int rank = t.rank();
  const int r = t.r();
  bool exact = true;
  for (const auto& e : t.entries()) exact = exact && e.exact();
  std::vector<MultivectorField> entries;
  for (std::size_t n = 0; n < t.size(); ++n) {
    const MultiIndex ni = IndexedField::unflat(n, rank);
    std::vector<std::pair<double, MultivectorField::EvalFn>> terms;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double c = index_factor(ni, IndexedField::unflat(k, rank), r, p, q);
      if (c != 0.0) terms.emplace_back(c, t.at_flat(k).eval_fn());
    }
    entries.emplace_back(
        [terms, q, o, shift](const Point& xt) {
          const Point x = q * (xt - shift);
          Multivectord acc;
          for (const auto& [c, f] : terms) acc += c * f(x);
          return Multivectord(o * acc.coeffs());
        },
        MultivectorField::PartialsFn{}, exact);
  }
  return IndexedField(t.r(), t.s(), std::move(entries));
}

CoordinateChangeResult coordinate_change_check(const IndexedField& t, const MetricField& mf,
                                               const Eigen::Matrix4d& jacobian, const Point& shift, const Point& x,
                                               double tol, double h) {
  require_positive_jacobian(jacobian);
  const Eigen::Matrix4d p = jacobian;
  const Eigen::Matrix4d q = jacobian.inverse();
  const Eigen::Matrix<double, 16, 16> o = outermorphism(q);
  const MetricField mt = transformed_metric(mf, jacobian, shift);
  const IndexedField tt = transform_indexed_field(t, jacobian, shift);
  const Point xt = jacobian * x + shift;
  const int rank = t.rank();

  // D_sigma T as a rank (r, s + 1) object with sigma as the last index.
  auto stack = [rank](const std::array<IndexedValue, 4>& per_direction) {
    std::vector<Multivectord> out(pow4(rank + 1));
    for (std::size_t i = 0; i < pow4(rank); ++i)
      for (int sigma = 0; sigma < 4; ++sigma) out[4 * i + sigma] = per_direction[sigma].entries[i];
    return out;
  };
  std::array<IndexedValue, 4> old_d;
  std::array<IndexedValue, 4> new_d;
  for (int sigma = 0; sigma < 4; ++sigma) {
    old_d[sigma] = detail::full_covariant_derivative(t, sigma, x, mf, h);
    new_d[sigma] = detail::full_covariant_derivative(tt, sigma, xt, mt, h);
  }
  const std::vector<Multivectord> expected = transform_values(stack(old_d), t.r(), rank + 1, p, q, o);
  const std::vector<Multivectord> actual = stack(new_d);

  CoordinateChangeResult res;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    res.max_residual = std::max(res.max_residual, max_abs_diff(expected[i], actual[i]));
    res.scale = std::max(res.scale, expected[i].norm_inf());
  }
  res.pass = res.max_residual <= tol;
  return res;
}

}  // namespace tdirac
