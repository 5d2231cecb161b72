#include "tdirac/geometry.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tdirac/errors.hpp"
#include "tdirac/io.hpp"
#include "tdirac/random.hpp"

namespace tdirac {

Rank3 zero_rank3() {
  Rank3 r;
  for (auto& m : r) m.setZero();
  return r;
}

Rank4 zero_rank4() {
  Rank4 r;
  for (auto& row : r)
    for (auto& m : row) m.setZero();
  return r;
}

namespace {

std::string format_point(const Point& x) {
  std::ostringstream os;
  os << '(' << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3] << ')';
  return os.str();
}

const Eigen::Matrix4d& eta() {
  static const Eigen::Matrix4d m = Eigen::Vector4d(1, -1, -1, -1).asDiagonal().toDenseMatrix();
  return m;
}

}  // namespace

// --- ChartBox ----------------------------------------------------------------

bool ChartBox::contains(const Point& x) const {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

std::vector<Point> ChartBox::nodes() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n[0] * n[1] * n[2] * n[3]));
  for (int i0 = 0; i0 < n[0]; ++i0)
    for (int i1 = 0; i1 < n[1]; ++i1)
      for (int i2 = 0; i2 < n[2]; ++i2)
        for (int i3 = 0; i3 < n[3]; ++i3) {
          const std::array<int, 4> idx = {i0, i1, i2, i3};
          Point x;
          for (int k = 0; k < 4; ++k)
            x[k] = lo[k] + (hi[k] - lo[k]) * static_cast<double>(idx[k]) / static_cast<double>(n[k] - 1);
          out.push_back(x);
        }
  return out;
}

Point ChartBox::random_interior(Rng& rng, double margin) const {
  Point x;
  for (int k = 0; k < 4; ++k) x[k] = rng.uniform(lo[k] + margin, hi[k] - margin);
  return x;
}

void ChartBox::validate() const {
  for (int k = 0; k < 4; ++k) {
    if (!(lo[k] < hi[k])) throw ConfigError("chart box: lo must be below hi in every coordinate");
    if (n[k] < 2) throw ConfigError("chart box: need at least 2 samples per coordinate");
  }
}

void require_stencil(const ChartBox& box, const Point& x, double step) {
  for (int k = 0; k < 4; ++k) {
    if (x[k] - step < box.lo[k] || x[k] + step > box.hi[k]) {
      std::ostringstream os;
      os << "finite-difference stencil of width " << step << " at " << format_point(x)
         << " leaves the chart box in coordinate " << k;
      throw BoundaryError(os.str());
    }
  }
}

// --- MetricField -------------------------------------------------------------

MetricField::MetricField(std::string label, ChartBox box, ValueFn g, GradientFn dg, HessianFn d2g)
    : label_(std::move(label)), descriptor_(label_), box_(box), g_(std::move(g)), dg_(std::move(dg)),
      d2g_(std::move(d2g)) {}

MetricAtPointd MetricField::at(const Point& x) const {
  try {
    return MetricAtPointd(g_(x));
  } catch (const MetricAxiomViolation& e) {
    throw MetricAxiomViolation(label_ + " at " + format_point(x) + ": " + e.what());
  }
}

MetricGradient MetricField::gradient_fd(const Point& x, double h) const {
  require_stencil(box_, x, h);
  MetricGradient out;
  for (int k = 0; k < 4; ++k) {
    Point xp = x;
    Point xm = x;
    xp[k] += h;
    xm[k] -= h;
    out[k] = (g_(xp) - g_(xm)) / (2.0 * h);
  }
  return out;
}

MetricGradient MetricField::gradient(const Point& x, double h) const {
  if (dg_) return dg_(x);
  return gradient_fd(x, h);
}

MetricHessian MetricField::hessian(const Point& x, double h) const {
  if (d2g_) return d2g_(x);
  const double step = h;
  require_stencil(box_, x, step);
  MetricHessian out;
  for (int k = 0; k < 4; ++k) {
    Point xp = x;
    Point xm = x;
    xp[k] += step;
    xm[k] -= step;
    const MetricGradient gp = gradient(xp, h);
    const MetricGradient gm = gradient(xm, h);
    for (int l = 0; l < 4; ++l) out[k][l] = (gp[l] - gm[l]) / (2.0 * step);
  }
  // Symmetrize the mixed partials; the two difference orders agree to O(step^2).
  for (int k = 0; k < 4; ++k)
    for (int l = k + 1; l < 4; ++l) {
      const Eigen::Matrix4d avg = 0.5 * (out[k][l] + out[l][k]);
      out[k][l] = avg;
      out[l][k] = avg;
    }
  return out;
}

void MetricField::validate_on_grid() const {
  const auto nodes = box_.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      (void)MetricAtPointd(g_(nodes[i]));
    } catch (const MetricAxiomViolation& e) {
      std::ostringstream os;
      os << label_ << ": axiom violation at grid node " << i << ' ' << format_point(nodes[i]) << ": "
         << e.what();
      throw MetricAxiomViolation(os.str());
    }
  }
}

// --- Christoffel and curvature --------------------------------------------

ChristoffelAtPoint christoffel_from(const MetricAtPointd& m, const MetricGradient& dg) {
  ChristoffelAtPoint out{zero_rank3()};
  const Eigen::Matrix4d& gi = m.ginv();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu; nu < 4; ++nu) {
      Eigen::Vector4d lowered;  // d_mu g_{nu k} + d_nu g_{mu k} - d_k g_{mu nu}
      for (int k = 0; k < 4; ++k) lowered[k] = dg[mu](nu, k) + dg[nu](mu, k) - dg[k](mu, nu);
      const Eigen::Vector4d raised = 0.5 * gi * lowered;
      for (int l = 0; l < 4; ++l) {
        out.gamma[l](mu, nu) = raised[l];
        out.gamma[l](nu, mu) = raised[l];
      }
    }
  return out;
}

ChristoffelAtPoint christoffel(const MetricField& mf, const Point& x, double h) {
  return christoffel_from(mf.at(x), mf.gradient(x, h));
}

Rank4 christoffel_derivative(const MetricField& mf, const Point& x, double h) {
  Rank4 out = zero_rank4();
  if (mf.has_analytic_hessian()) {
    const MetricAtPointd m = mf.at(x);
    const Eigen::Matrix4d& gi = m.ginv();
    const MetricGradient dg = mf.gradient(x, h);
    const MetricHessian d2g = mf.hessian(x, h);
    for (int r = 0; r < 4; ++r) {
      const Eigen::Matrix4d dginv = -gi * dg[r] * gi;
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          Eigen::Vector4d t;
          Eigen::Vector4d dt;
          for (int k = 0; k < 4; ++k) {
            t[k] = dg[mu](nu, k) + dg[nu](mu, k) - dg[k](mu, nu);
            dt[k] = d2g[r][mu](nu, k) + d2g[r][nu](mu, k) - d2g[r][k](mu, nu);
          }
          const Eigen::Vector4d v = 0.5 * (dginv * t + gi * dt);
          for (int l = 0; l < 4; ++l) out[r][l](mu, nu) = v[l];
        }
    }
    return out;
  }
  const double step = h;
  require_stencil(mf.box(), x, step);
  for (int r = 0; r < 4; ++r) {
    Point xp = x;
    Point xm = x;
    xp[r] += step;
    xm[r] -= step;
    const ChristoffelAtPoint gp = christoffel(mf, xp, h);
    const ChristoffelAtPoint gm = christoffel(mf, xm, h);
    for (int l = 0; l < 4; ++l) out[r][l] = (gp.gamma[l] - gm.gamma[l]) / (2.0 * step);
  }
  return out;
}

Rank4 curvature_from_connection(const Rank3& gamma, const Rank4& dgamma) {
  Rank4 out = zero_rank4();
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          double v = dgamma[mu][k](nu, l) - dgamma[nu][k](mu, l);
          for (int e = 0; e < 4; ++e) v += gamma[k](mu, e) * gamma[e](nu, l) - gamma[k](nu, e) * gamma[e](mu, l);
          out[k][l](mu, nu) = v;
        }
  return out;
}

CurvatureAtPoint riemann(const MetricField& mf, const Point& x, double h) {
  const MetricAtPointd m = mf.at(x);
  const ChristoffelAtPoint gam = christoffel(mf, x, h);
  const Rank4 dgam = christoffel_derivative(mf, x, h);
  CurvatureAtPoint out;
  out.mixed = curvature_from_connection(gam.gamma, dgam);
  out.lower = zero_rank4();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < 4; ++k) out.lower[a][b] += m.g()(k, a) * out.mixed[k][b];
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      Multivectord c;
      for (int i = grade_begin(2); i < grade_end(2); ++i) {
        const auto idx = indices_of(blade_at(i));
        c[i] = out.lower[idx[0]][idx[1]](mu, nu);
      }
      out.c2form[mu][nu] = c;
    }
  return out;
}

// --- catalog -------------------------------------------------------------------

std::vector<CatalogEntry> catalog_entries() {
  return {
      {"minkowski", "", "diag(1,-1,-1,-1) on [-1,1]^4"},
      {"flrw", "a0=1,k=0.1", "diag(1,-a^2,-a^2,-a^2) with a(t) = a0 + k t, on [-1,1]^4"},
      {"polynomial", "eps=0.05",
       "eta + eps P(x) with P a fixed symmetric quadratic polynomial matrix, on [-1,1]^4"},
      {"conformal", "w=0.2",
       "exp(2 w phi(x)) eta with phi = x0^2/2 - 0.3 x1 x2 + 0.2 x3 + 0.1 x0 x3, on [-1,1]^4"},
  };
}

namespace {

double param(const std::vector<double>& p, std::size_t i, double fallback) {
  return i < p.size() ? p[i] : fallback;
}

MetricField make_minkowski() {
  MetricField mf(
      "minkowski", ChartBox{}, [](const Point&) { return eta(); },
      [](const Point&) {
        MetricGradient z;
        for (auto& m : z) m.setZero();
        return z;
      },
      [](const Point&) {
        MetricHessian z;
        for (auto& row : z)
          for (auto& m : row) m.setZero();
        return z;
      });
  mf.mark_constant();
  return mf;
}

MetricField make_flrw(double a0, double k) {
  if (!(a0 - std::abs(k) > 0.0)) throw ConfigError("flrw: scale factor must stay positive on t in [-1,1]");
  auto scale = [a0, k](double t) { return a0 + k * t; };
  MetricField mf(
      "flrw", ChartBox{},
      [scale](const Point& x) {
        const double a = scale(x[0]);
        return Eigen::Vector4d(1, -a * a, -a * a, -a * a).asDiagonal().toDenseMatrix().eval();
      },
      [scale, k](const Point& x) {
        const double a = scale(x[0]);
        MetricGradient d;
        for (auto& m : d) m.setZero();
        for (int i = 1; i < 4; ++i) d[0](i, i) = -2.0 * a * k;
        return d;
      },
      [k](const Point&) {
        MetricHessian d;
        for (auto& row : d)
          for (auto& m : row) m.setZero();
        for (int i = 1; i < 4; ++i) d[0][0](i, i) = -2.0 * k * k;
        return d;
      });
  return mf;
}

// Fixed coefficients so the family is reproducible everywhere.
struct PolynomialCoefficients {
  Eigen::Matrix4d constant;
  std::array<Eigen::Matrix4d, 4> linear;
  std::array<std::array<Eigen::Matrix4d, 4>, 4> quadratic;  // symmetric in the two outer indices
};

PolynomialCoefficients polynomial_coefficients() {
  Rng rng(0x5eedULL, "polynomial-metric");
  auto sym = [&rng](double amp) {
    Eigen::Matrix4d a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = rng.uniform(-amp, amp);
    return Eigen::Matrix4d(0.5 * (a + a.transpose()));
  };
  PolynomialCoefficients c;
  c.constant = sym(1.0);
  for (auto& l : c.linear) l = sym(0.5);
  for (int k = 0; k < 4; ++k)
    for (int l = k; l < 4; ++l) {
      c.quadratic[k][l] = sym(0.25);
      c.quadratic[l][k] = c.quadratic[k][l];
    }
  return c;
}

MetricField make_polynomial(double eps) {
  const PolynomialCoefficients c = polynomial_coefficients();
  // g = eta + eps (C + L_k x^k + 1/2 Q_kl x^k x^l)
  return MetricField(
      "polynomial", ChartBox{},
      [c, eps](const Point& x) {
        Eigen::Matrix4d p = c.constant;
        for (int k = 0; k < 4; ++k) {
          p += c.linear[k] * x[k];
          for (int l = 0; l < 4; ++l) p += 0.5 * c.quadratic[k][l] * x[k] * x[l];
        }
        return Eigen::Matrix4d(eta() + eps * p);
      },
      [c, eps](const Point& x) {
        MetricGradient d;
        for (int k = 0; k < 4; ++k) {
          Eigen::Matrix4d v = c.linear[k];
          for (int l = 0; l < 4; ++l) v += c.quadratic[k][l] * x[l];
          d[k] = eps * v;
        }
        return d;
      },
      [c, eps](const Point&) {
        MetricHessian d;
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) d[k][l] = eps * c.quadratic[k][l];
        return d;
      });
}

MetricField make_conformal(double w) {
  // phi = x0^2/2 - 0.3 x1 x2 + 0.2 x3 + 0.1 x0 x3
  auto phi = [](const Point& x) { return 0.5 * x[0] * x[0] - 0.3 * x[1] * x[2] + 0.2 * x[3] + 0.1 * x[0] * x[3]; };
  auto dphi = [](const Point& x) {
    return Eigen::Vector4d(x[0] + 0.1 * x[3], -0.3 * x[2], -0.3 * x[1], 0.2 + 0.1 * x[0]);
  };
  Eigen::Matrix4d ddphi = Eigen::Matrix4d::Zero();
  ddphi(0, 0) = 1.0;
  ddphi(1, 2) = ddphi(2, 1) = -0.3;
  ddphi(0, 3) = ddphi(3, 0) = 0.1;
  // omega = exp(w phi), g = omega^2 eta
  return MetricField(
      "conformal", ChartBox{},
      [phi, w](const Point& x) { return Eigen::Matrix4d(std::exp(2.0 * w * phi(x)) * eta()); },
      [phi, dphi, w](const Point& x) {
        const double o2 = std::exp(2.0 * w * phi(x));
        const Eigen::Vector4d dp = dphi(x);
        MetricGradient d;
        for (int k = 0; k < 4; ++k) d[k] = 2.0 * w * dp[k] * o2 * eta();
        return d;
      },
      [phi, dphi, ddphi, w](const Point& x) {
        const double o2 = std::exp(2.0 * w * phi(x));
        const Eigen::Vector4d dp = dphi(x);
        MetricHessian d;
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            d[k][l] = (4.0 * w * w * dp[k] * dp[l] + 2.0 * w * ddphi(k, l)) * o2 * eta();
        return d;
      });
}

std::string join_params(const std::string& name, const std::vector<double>& p) {
  std::ostringstream os;
  os << name;
  for (std::size_t i = 0; i < p.size(); ++i) os << (i == 0 ? ':' : ',') << p[i];
  return os.str();
}

}  // namespace

MetricField metric_catalog(const std::string& name, const std::vector<double>& params) {
  MetricField mf = [&]() {
    if (name == "minkowski") {
      if (!params.empty()) throw ConfigError("minkowski takes no parameters");
      return make_minkowski();
    }
    if (name == "flrw") {
      if (params.size() > 2) throw ConfigError("flrw takes at most 2 parameters (a0, k)");
      return make_flrw(param(params, 0, 1.0), param(params, 1, 0.1));
    }
    if (name == "polynomial") {
      if (params.size() > 1) throw ConfigError("polynomial takes at most 1 parameter (eps)");
      return make_polynomial(param(params, 0, 0.05));
    }
    if (name == "conformal") {
      if (params.size() > 1) throw ConfigError("conformal takes at most 1 parameter (w)");
      return make_conformal(param(params, 0, 0.2));
    }
    throw UnknownMetric("unknown metric '" + name + "' (known: minkowski, flrw, polynomial, conformal)");
  }();
  mf.set_descriptor(join_params(name, params));
  return mf;
}

MetricField metric_from_descriptor(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "sampled") {
    if (rest.empty()) throw ConfigError("sampled metric needs a file path: sampled:<path>");
    MetricField mf = load_sampled_metric(rest);
    mf.set_descriptor(text);
    return mf;
  }
  std::vector<double> params;
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad metric parameter '" + item + "' in '" + text + "'");
    }
  }
  return metric_catalog(name, params);
}

std::vector<std::pair<std::size_t, double>> grid_weights(const ChartBox& box, const Point& x) {
  std::array<int, 4> base{};
  std::array<double, 4> frac{};
  for (int k = 0; k < 4; ++k) {
    const double cell = (box.hi[k] - box.lo[k]) / static_cast<double>(box.n[k] - 1);
    double s = (x[k] - box.lo[k]) / cell;
    s = std::clamp(s, 0.0, static_cast<double>(box.n[k] - 1));
    int i = static_cast<int>(std::floor(s));
    if (i >= box.n[k] - 1) i = box.n[k] - 2;
    base[k] = i;
    frac[k] = s - i;
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (int corner = 0; corner < 16; ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int k = 0; k < 4; ++k) {
      const int bit = (corner >> k) & 1;
      w *= bit ? frac[k] : 1.0 - frac[k];
      flat = flat * static_cast<std::size_t>(box.n[k]) + static_cast<std::size_t>(base[k] + bit);
    }
    if (w != 0.0) out.emplace_back(flat, w);
  }
  return out;
}

MetricField sampled_metric(const ChartBox& box, const std::vector<Eigen::Matrix4d>& samples) {
  box.validate();
  const std::size_t expected = static_cast<std::size_t>(box.n[0] * box.n[1] * box.n[2] * box.n[3]);
  if (samples.size() != expected) throw ConfigError("sampled metric: sample count does not match the box grid");
  auto interp = [box, samples](const Point& x) {
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    for (const auto& [node, w] : grid_weights(box, x)) out += w * samples[node];
    return out;
  };
  MetricField mf("sampled", box, interp);
  mf.mark_interpolated();
  return mf;
}

MetricField transformed_metric(const MetricField& mf, const Eigen::Matrix4d& jacobian, const Point& shift) {
  if (!(jacobian.determinant() > 0.0)) throw JacobianError("coordinate change must have positive Jacobian");
  const Eigen::Matrix4d q = jacobian.inverse();  // q^m_a = dx^m / dxt^a
  auto to_old = [q, shift](const Point& xt) { return Point(q * (xt - shift)); };
  // Bounding box of the image of the old box.
  ChartBox box = mf.box();
  Point lo = Point::Constant(1e300);
  Point hi = Point::Constant(-1e300);
  for (int corner = 0; corner < 16; ++corner) {
    Point c;
    for (int k = 0; k < 4; ++k) c[k] = ((corner >> k) & 1) ? mf.box().hi[k] : mf.box().lo[k];
    const Point img = jacobian * c + shift;
    lo = lo.cwiseMin(img);
    hi = hi.cwiseMax(img);
  }
  box.lo = lo;
  box.hi = hi;
  MetricField::GradientFn dg;
  MetricField::HessianFn d2g;
  if (mf.has_analytic_gradient()) {
    dg = [mf, q, to_old](const Point& xt) {
      const MetricGradient old = mf.gradient(to_old(xt), 0.0);
      MetricGradient out;
      for (int c = 0; c < 4; ++c) {
        out[c].setZero();
        for (int k = 0; k < 4; ++k) out[c] += q(k, c) * (q.transpose() * old[k] * q);
      }
      return out;
    };
  }
  if (mf.has_analytic_hessian()) {
    d2g = [mf, q, to_old](const Point& xt) {
      const MetricHessian old = mf.hessian(to_old(xt), 0.0);
      MetricHessian out;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          out[c][d].setZero();
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) out[c][d] += q(k, c) * q(l, d) * (q.transpose() * old[k][l] * q);
        }
      return out;
    };
  }
  MetricField out(
      mf.label() + "~", box,
      [mf, q, to_old](const Point& xt) { return Eigen::Matrix4d(q.transpose() * mf.g_raw(to_old(xt)) * q); }, dg,
      d2g);
  out.mark_constant(mf.is_constant());
  out.set_descriptor(mf.descriptor() + " (affine chart change)");
  return out;
}

}  // namespace tdirac
