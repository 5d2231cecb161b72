// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/geometry_reference.hpp"
#include "tdirac/affine.hpp"
#include "tdirac/calculus.hpp"
#include "tdirac/dirac.hpp"
#include "tdirac/errors.hpp"
#include "tdirac/harness.hpp"
#include "tdirac/tolerance.hpp"

using namespace tdirac;

namespace {

const TolerancePolicy kTol;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<MetricField> mink_flrw() { return {metric_catalog("minkowski"), metric_catalog("flrw")}; }

Point interior(Rng& rng, const MetricField& mf) { return mf.box().random_interior(rng, 0.2); }

double max_abs(const Rank4& r) {
  double out = 0.0;
  for (const auto& row : r)
    for (const auto& m : row) out = std::max(out, m.cwiseAbs().maxCoeff());
  return out;
}

Point point(const double* p) { return Point(p[0], p[1], p[2], p[3]); }

MetricField without_derivatives(const MetricField& mf) {
  return MetricField(mf.label() + "-fd", mf.box(), [mf](const Point& x) { return mf.g_raw(x); });
}

MetricField with_gradient_only(const MetricField& mf) {
  return MetricField(mf.label() + "-grad", mf.box(), [mf](const Point& x) { return mf.g_raw(x); },
                     [mf](const Point& x) { return mf.gradient(x, 0.0); });
}

double christoffel_error(const ChristoffelAtPoint& c, const double* ref) {
  double err = 0.0;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) err = std::max(err, std::abs(c(l, m, n) - ref[16 * l + 4 * m + n]));
  return err;
}

double riemann_error(const Rank4& r, const double* ref) {
  double err = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) err = std::max(err, std::abs(r[k][l](m, n) - ref[64 * k + 16 * l + 4 * m + n]));
  return err;
}

const CheckRecord* find(const Report& r, const std::string& id) {
  for (const CheckRecord& c : r.checks)
    if (c.id == id) return &c;
  return nullptr;
}

// All named checks present and passing; appends their residuals to `d`.
bool checks_pass(const Report& r, const std::vector<std::string>& ids, Detail& d) {
  bool ok = true;
  for (const std::string& id : ids) {
    const CheckRecord* c = find(r, id);
    if (!c) {
      d << id << " missing; ";
      ok = false;
      continue;
    }
    d << id << " " << c->max_residual << "/" << c->tolerance << "; ";
    ok = ok && c->pass;
  }
  return ok;
}

// --- criteria -----------------------------------------------------------------------

Outcome algebra_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(42, "acceptance-oracle");
  double worst = 0.0;
  for (int metric = 0; metric < 20; ++metric) {
    const MetricAtPointd m = random_metric(rng);
    for (int pair = 0; pair < 1000; ++pair) {
      const Multivectord u = random_multivector(rng), v = random_multivector(rng);
      const Multivectord a = clifford_mul(u, v, m);
      const Multivectord b = clifford_mul_oracle(u, v, m);
      worst = std::max(worst, max_abs_diff(a, b) / std::max(a.norm_inf(), b.norm_inf()));
    }
  }
  const double t = seconds_since(t0);
  Detail d;
  d << "20 metrics x 1000 pairs, max relative discrepancy " << worst << " (<= 1e-12), " << t << " s (< 5 s)";
  return {worst <= 1e-12 && t < 5.0, d.str()};
}

Outcome algebra_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteConfig cfg;
  cfg.suite = "algebra";
  cfg.samples = 200;
  const Report r = run_suite(cfg);
  const double t = seconds_since(t0);
  double worst = 0.0;
  for (const CheckRecord& c : r.checks) worst = std::max(worst, c.max_residual);
  Detail d;
  d << r.passed() << "/" << r.checks.size() << " checks, worst relative residual " << worst << " (<= 1e-11), " << t
    << " s (< 5 s)";
  return {r.all_passed() && worst <= 1e-11 && t < 5.0, d.str()};
}

Outcome geometry_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  using namespace tdirac::reference;
  bool ok = true;
  Detail d;
  for (const char* metric : {"minkowski", "flrw:1,0.1"}) {
    SuiteConfig cfg;
    cfg.suite = "geometry";
    cfg.metric = metric;
    const Report r = run_suite(cfg);
    ok = ok && r.all_passed();
    d << metric << " suite " << r.passed() << "/" << r.checks.size() << "; ";
  }
  // Symbolic oracle with analytic and finite-difference derivatives.
  const MetricField flrw = metric_catalog("flrw");
  const MetricField flrw_fd = without_derivatives(flrw);
  const double bound = 50.0 * kTol.h * kTol.h;
  double christ = 0.0;
  double riem = 0.0;
  const double* points[] = {kFlrwPointA, kFlrwPointB, kFlrwPointC};
  const double* gammas[] = {kFlrwChristoffelA, kFlrwChristoffelB, kFlrwChristoffelC};
  const double* riemanns[] = {kFlrwRiemannA, kFlrwRiemannB, kFlrwRiemannC};
  for (int i = 0; i < 3; ++i) {
    christ = std::max({christ, christoffel_error(christoffel(flrw, point(points[i])), gammas[i]),
                       christoffel_error(christoffel(flrw_fd, point(points[i])), gammas[i])});
    riem = std::max({riem, riemann_error(riemann(flrw, point(points[i])).mixed, riemanns[i]),
                     riemann_error(riemann(with_gradient_only(flrw), point(points[i])).mixed, riemanns[i])});
  }
  ok = ok && christ <= bound && riem <= bound;
  d << "oracle Christoffel " << christ << ", Riemann " << riem << " (<= " << bound << "); ";
  // Convergence order under step halving: d Gamma by central differences of
  // the (non-polynomial) FLRW Christoffel symbols.
  const Point x(0.3, 0.1, -0.2, 0.4);
  const Rank4 exact = christoffel_derivative(flrw, x);
  auto err = [&](double h) {
    const Rank4 dg = christoffel_derivative(with_gradient_only(flrw), x, h);
    double e = 0.0;
    for (int r = 0; r < 4; ++r)
      for (int l = 0; l < 4; ++l) e = std::max(e, (dg[r][l] - exact[r][l]).cwiseAbs().maxCoeff());
    return e;
  };
  const double order = std::log2(err(4e-2) / err(2e-2));
  ok = ok && order >= 1.9;
  const double t = seconds_since(t0);
  ok = ok && t < 30.0;
  d << "FD order " << order << " (>= 1.9), " << t << " s (< 30 s)";
  return {ok, d.str()};
}

Outcome curvature_commutator() {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricField mf = metric_catalog("flrw");
  Rng rng(42, "acceptance-commutator");
  double worst = 0.0;
  double worst_abs = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
    const Point x = interior(rng, mf);
    const int mu = rng.index(4);
    const int nu = (mu + 1 + rng.index(3)) % 4;
    const double r = curvature_commutator_check(u, x, mf, mu, nu).norm_inf();
    worst = std::max(worst, r / (1.0 + u(x).norm_inf()));
    worst_abs = std::max(worst_abs, r);
  }
  const double t = seconds_since(t0);
  const double tol = kTol.nested_fd();
  Detail d;
  d << "100 draws on FLRW, max normalized residual " << worst << " (absolute " << worst_abs << ") <= " << tol << ", "
    << t << " s (< 60 s)";
  return {worst <= tol && tol <= 1e-4 && t < 60.0, d.str()};
}

Outcome plane_wave() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  Detail d;
  for (const Eigen::Vector4d& p : {Eigen::Vector4d(1, 0, 0, 0), Eigen::Vector4d(std::sqrt(2.0), 1, 0, 0)}) {
    PlanewaveConfig cfg;
    cfg.p = p;
    cfg.samples = 100;
    const Report r = run_planewave(cfg);
    const CheckRecord* main = find(r, "planewave.residual_main");
    const CheckRecord* cons = find(r, "planewave.conservation");
    ok = ok && r.all_passed() && main && cons && main->max_residual <= 1e-9 && cons->max_residual <= 1e-8;
    d << "p=(" << p[0] << "," << p[1] << ",0,0) residual " << (main ? main->max_residual : -1.0) << " conservation "
      << (cons ? cons->max_residual : -1.0) << "; ";
  }
  int rejected = 0;
  for (const Eigen::Vector4d& p : {Eigen::Vector4d(1, 1, 0, 0), Eigen::Vector4d(std::sqrt(1.1), 0, 0, 0)}) {
    try {
      planewave_solve(p, 1.0);
    } catch (const OffShellMomentum&) {
      ++rejected;
    }
  }
  ok = ok && rejected == 2;
  const double t = seconds_since(t0);
  ok = ok && t < 10.0;
  d << "off-shell rejected " << rejected << "/2, " << t << " s (< 10 s)";
  return {ok, d.str()};
}

Outcome gauge_covariance() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  Detail d;
  for (const char* metric : {"minkowski", "flrw:1,0.1"}) {
    SuiteConfig cfg;
    cfg.suite = "dirac";
    cfg.metric = metric;
    cfg.samples = 50;
    const Report r = run_suite(cfg);
    d << metric << ": ";
    ok = checks_pass(r,
                     {"dirac.spin_covariance", "dirac.u1_covariance", "dirac.lagrangian_invariance",
                      "dirac.ut_covariance", "dirac.bg_conjugation"},
                     d) &&
         ok;
  }
  const double t = seconds_since(t0);
  ok = ok && t < 60.0;
  d << t << " s (< 60 s)";
  return {ok, d.str()};
}

Outcome trace_identity() {
  Rng rng(42, "acceptance-trace");
  double worst = 0.0;
  double smallest_div = 1e300;
  for (const MetricField& mf : mink_flrw()) {
    for (int draw = 0; draw < 50; ++draw) {
      const DiracState st = random_state(rng, mf);
      const ConservationResult c = conservation_residual(st, interior(rng, mf), mf);
      worst = std::max(worst, std::abs(c.identity_residual) / (1.0 + c.scale));
      smallest_div = std::min(smallest_div, std::abs(c.divergence));
    }
  }
  Detail d;
  d << "50 draws each on Minkowski and FLRW, max normalized residual " << worst << " <= " << kTol.fd()
    << " (states are non-solutions: min |divergence| " << smallest_div << ")";
  return {worst <= kTol.fd(), d.str()};
}

Outcome conjugation_lemma() {
  Rng rng(42, "acceptance-lemma");
  const MetricField mink = metric_catalog("minkowski");
  double constant = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    DiracState st = DiracState::vacuum(rng.uniform(0.5, 1.5));
    st.psi = MultivectorField::constant(random_even(rng));
    for (auto& a : st.a) a = MultivectorField::constant(Multivectord::scalar(rng.uniform(-1.0, 1.0)));
    constant = std::max(constant, conjugate_lemma_check(st, interior(rng, mink), mink).norm_inf());
  }
  const MetricField flrw = metric_catalog("flrw");
  double curved = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    const DiracState st = random_state(rng, flrw);
    const Point x = interior(rng, flrw);
    const double r = conjugate_lemma_check(st, x, flrw).norm_inf();
    curved = std::max(curved, r / (1.0 + dirac_form(st, x, flrw).norm_inf()));
  }
  Detail d;
  d << "constant-coefficient Minkowski " << constant << " (<= 1e-10), FLRW random states " << curved
    << " (<= " << kTol.fd() << ")";
  return {constant <= 1e-10 && curved <= kTol.fd(), d.str()};
}

Outcome affine_model() {
  Rng rng(42, "acceptance-affine");
  double derivative = 0.0;
  double flatness = 0.0;
  for (const MetricField& mf : mink_flrw()) {
    for (int draw = 0; draw < 100; ++draw) {
      const ContorsionField k = random_contorsion(rng, mf.box());
      const MultivectorField u = random_smooth_field(rng, {0, 1, 2, 3, 4});
      const Point x = interior(rng, mf);
      const int mu = rng.index(4);
      derivative = std::max(derivative, affine_derivative_residual(u, k, x, mf, mu).norm_inf() / (1.0 + u(x).norm_inf()));
      const FlatnessCheck f = flatness_check(k, x, mf);
      flatness = std::max(flatness, f.residual / (1.0 + f.scale));
    }
  }
  // Pure gauge B = -U^-1 dU on Minkowski.
  const MetricField mink = metric_catalog("minkowski");
  double pure = 0.0;
  for (int field = 0; field < 5; ++field) {
    const GaugeElement u = random_spin_field(rng, mink);
    const GaugeField b = pure_gauge_b(u, mink);
    const ContorsionField k = contorsion_field_from_gauge(b, {Point::Zero()});
    for (int s = 0; s < 4; ++s) {
      const Point x = interior(rng, mink);
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) pure = std::max(pure, residual_bg(b, x, mink, mu, nu).norm_inf());
      const FlatnessCheck f = flatness_check(k, x, mink);
      pure = std::max(pure, max_abs(f.rcheck));
    }
  }
  // Torsion <-> contorsion round trips.
  double round_trip = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const MetricAtPointd m = random_metric(rng);
    Rank3 t = zero_rank3();
    for (int l = 0; l < 4; ++l)
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          t[l](a, b) = rng.uniform(-1.0, 1.0);
          t[l](b, a) = -t[l](a, b);
        }
    const Rank3 k = contorsion_from_torsion(t, m);
    const Rank3 back = torsion_from_contorsion(k);
    for (int l = 0; l < 4; ++l) round_trip = std::max(round_trip, (back[l] - t[l]).cwiseAbs().maxCoeff());
  }
  const double tol = kTol.fd();
  Detail d;
  d << "derivative two routes " << derivative << ", flatness two routes " << flatness << " (<= " << tol
    << "); pure gauge curvature equation and R-check " << pure << " (<= " << tol << "); torsion round trip "
    << round_trip << " (<= 1e-12)";
  return {derivative <= tol && flatness <= tol && pure <= tol && round_trip <= 1e-12, d.str()};
}

Outcome maxwell_block() {
  Rng rng(42, "acceptance-maxwell");
  double df = 0.0;
  double dd = 0.0;
  double hodge = 0.0;
  for (const MetricField& mf : mink_flrw()) {
    for (int draw = 0; draw < 20; ++draw) {
      const MultivectorField a = random_smooth_field(rng, {1});
      const MultivectorField f = d_field(a, mf);
      const Point x = interior(rng, mf);
      df = std::max(df, d_op(f, x, mf).norm_inf() / (1.0 + f(x).norm_inf()));
      const int k = 1 + draw % 4;
      const MultivectorField u = random_smooth_field(rng, {k});
      dd = std::max(dd, delta_op(delta_field(u, mf), x, mf).norm_inf() / (1.0 + u(x).norm_inf()));
      const Multivectord lhs = delta_op(u, x, mf);
      const Multivectord rhs = hodge_star(d_op(hodge_star(u, mf), x, mf), mf.at(x));
      hodge = std::max(hodge, max_abs_diff(lhs, rhs) / (1.0 + std::max(lhs.norm_inf(), rhs.norm_inf())));
    }
  }
  double lagr = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const MaxwellLagrangian l = maxwell_lagrangian(random_homogeneous(rng, 2), random_metric(rng));
    lagr = std::max(lagr, std::abs(l.trace_form - l.component_form) / std::max(1.0, std::abs(l.trace_form)));
  }
  Detail d;
  d << "dF " << df << " and delta^2 " << dd << " (nested FD <= " << kTol.nested_fd() << "), delta - *d* " << hodge
    << " (FD <= " << kTol.fd() << "), Lagrangian identity " << lagr << " (<= 1e-11)";
  return {df <= kTol.nested_fd() && dd <= kTol.nested_fd() && hodge <= kTol.fd() && lagr <= 1e-11, d.str()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TDIRAC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  SuiteConfig cfg;
  cfg.suite = "all";
  cfg.metric = "flrw:1,0.1";
  cfg.samples = 5;
  const std::string a = run_suite(cfg).to_json(false).dump(2);
  const std::string b = run_suite(cfg).to_json(false).dump(2);
  const int pass_code = run_cli("verify --suite algebra --samples 5");
  const int fail_code = run_cli("verify --suite algebra --samples 5 --inject-failure");
  cfg.inject_failure = true;
  const Report injected = run_suite(cfg);
  Detail d;
  d << "report bodies " << (a == b ? "byte-identical" : "DIFFER") << " (" << a.size() << " bytes); exit status "
    << pass_code << " on pass, " << fail_code << " with injected failure";
  return {a == b && pass_code == 0 && fail_code == 1 && !injected.all_passed(), d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Algebra oracle equivalence", algebra_oracle},
      {"Algebraic identity suite", algebra_identities},
      {"Geometry suite on Minkowski and FLRW", geometry_suite},
      {"Curvature commutator of Clifford derivatives on FLRW", curvature_commutator},
      {"Dirac plane wave", plane_wave},
      {"Gauge covariance and Lagrangian invariance", gauge_covariance},
      {"Trace identity for the conserved current", trace_identity},
      {"Conjugated form of the Dirac 1-form", conjugation_lemma},
      {"Affine connection, flatness and torsion", affine_model},
      {"Maxwell block", maxwell_block},
      {"Harness determinism and exit status", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("AC%zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
