#pragma once

#include <array>

#include "tdirac/calculus.hpp"
#include "tdirac/field.hpp"
#include "tdirac/geometry.hpp"
#include "tdirac/random.hpp"

namespace tdirac {

using GaugeField = std::array<MultivectorField, 4>;  // B_mu
using CovectorField = std::array<ScalarField, 4>;    // a_mu

// {Psi, H, I} with the external fields a_mu, B_mu and the mass m.
struct DiracState {
  MultivectorField psi;
  MultivectorField h;
  MultivectorField i;
  CovectorField a;
  GaugeField b;
  double m = 0.0;

  // Psi = 0, H = dx^0, I = dx^1 ^ dx^2, a = B = 0.
  static DiracState vacuum(double m = 0.0);
};

// A Spin-valued field S(x).
class GaugeElement {
 public:
  explicit GaugeElement(MultivectorField s) : s_(std::move(s)) {}
  static GaugeElement identity();

  const MultivectorField& field() const { return s_; }
  Multivectord operator()(const Point& x) const { return s_(x); }

  // Throws NotSpin at the first sample point where S is not in Spin.
  void require_spin(const MetricField& mf, const std::vector<Point>& points, double tol = 1e-9) const;

 private:
  MultivectorField s_;
};

struct MaxwellState {
  MultivectorField a;  // 1-form A
  MultivectorField f;  // 2-form F
  double alpha = 1.0;
};

// --- residuals ---------------------------------------------------------------

struct ConstraintResiduals {
  std::array<Multivectord, 4> upsilon_h;  // Upsilon_mu H - [B_mu, H]
  std::array<Multivectord, 4> upsilon_i;  // Upsilon_mu I - [B_mu, I]
  Multivectord h_squared;                 // H^2 - 1
  Multivectord i_squared;                 // I^2 + 1
  Multivectord h_i_commutator;            // [H, I]
  double max_abs() const;
};

struct MainResidual {
  Multivectord first_line;  // dx^mu (Y_mu Psi + Psi I a_mu + Psi B_mu) + m Psi H I
  ConstraintResiduals constraints;
};

MainResidual residual_main(const DiracState& st, const Point& x, const MetricField& mf, double h = 1e-3);

// Y_mu B_nu - Y_nu B_mu - [B_mu, B_nu] - 1/2 C_{mu nu}; Y_mu acts on each B_nu
// as a form.
Multivectord residual_bg(const GaugeField& b, const Point& x, const MetricField& mf, int mu, int nu,
                         double h = 1e-3);

// Y_mu U - [B_mu, U].
Multivectord parallel_residual(const MultivectorField& u, const GaugeField& b, int mu, const Point& x,
                               const MetricField& mf, double h = 1e-3);

// --- gauge transformations ---------------------------------------------------

// exp(lambda I) as a field.
MultivectorField u1_element(const ScalarField& lambda, const MultivectorField& i, const MetricField& mf);

// Psi -> Psi exp(lambda I), a_mu -> a_mu - d_mu lambda.
DiracState gauge_u1(const DiracState& st, const ScalarField& lambda, const MetricField& mf, double h = 1e-3);

// Psi -> Psi S, H -> S^-1 H S, I -> S^-1 I S, B_mu -> S^-1 B_mu S - S^-1 Y_mu S.
// S^-1 is evaluated as the reversion of S.
DiracState gauge_spin(const DiracState& st, const GaugeElement& s, const MetricField& mf, double h = 1e-3);

// A -> A - d lambda.
MaxwellState gauge_u1(const MaxwellState& ms, const ScalarField& lambda, const MetricField& mf, double h = 1e-3);

// --- conjugation, current, Lagrangian ---------------------------------------

// L = Psi* (dx^mu (Y_mu Psi + Psi I a_mu + Psi B_mu) + m Psi H I).
Multivectord dirac_form(const DiracState& st, const Point& x, const MetricField& mf, double h = 1e-3);

// H L* minus ((Y_mu Psibar - a_mu I Psibar - B_mu Psibar) dx^mu - m I H Psibar) Psi.
Multivectord conjugate_lemma_check(const DiracState& st, const Point& x, const MetricField& mf, double h = 1e-3);

// j^mu = Tr(Psibar dx^mu Psi).
Eigen::Vector4d current(const DiracState& st, const Point& x, const MetricField& mf);
// J = Psi H Psi*.
Multivectord current_form(const DiracState& st, const Point& x, const MetricField& mf);
MultivectorField current_field(const DiracState& st, const MetricField& mf);

struct ConservationResult {
  double divergence = 0.0;         // d_mu (sqrt(-g) j^mu)
  double trace_term = 0.0;         // Tr(H (L + L*))
  double identity_residual = 0.0;  // trace_term - divergence / sqrt(-g)
  double scale = 0.0;              // magnitude of the operands
};

ConservationResult conservation_residual(const DiracState& st, const Point& x, const MetricField& mf,
                                         double h = 1e-3);

// Tr(sqrt(-g) H L I).
double lagrangian_density(const DiracState& st, const Point& x, const MetricField& mf, double h = 1e-3);
// Tr(sqrt(-g) Psibar (dx^mu (Y_mu Psi + Psi I a_mu + Psi B_mu) I - m Psi H)).
double lagrangian_density_expanded(const DiracState& st, const Point& x, const MetricField& mf, double h = 1e-3);

// --- Maxwell coupling --------------------------------------------------------

struct MaxwellResidual {
  Multivectord da_minus_f;              // dA - F
  Multivectord delta_f_minus_alpha_j;   // delta F - alpha J
  Multivectord d_f;                     // dF
  Multivectord delta_j;                 // delta J
};

MaxwellResidual maxwell_residual(const MaxwellState& ms, const DiracState& st, const Point& x, const MetricField& mf,
                                 double h = 1e-3);

struct MaxwellLagrangian {
  double trace_form = 0.0;       // Tr(sqrt(-g) F^2)
  double component_form = 0.0;   // -1/2 sqrt(-g) f_{mn} f^{mn}
};

MaxwellLagrangian maxwell_lagrangian(const Multivectord& f, const MetricAtPointd& m);

struct UtResidual {
  Multivectord first_line;                // D Psi + A Psi I + B Psi + m Psi H I
  double curvature_line = 0.0;            // max over mu < nu of D_mu B_nu - D_nu B_mu + [B_mu, B_nu] - C/2
  std::array<Multivectord, 4> d_h;        // D_mu H
  std::array<Multivectord, 4> d_i;        // D_mu I
  Multivectord h_squared;
  Multivectord i_squared;
  Multivectord h_i_commutator;
  Multivectord da_minus_f;
  Multivectord delta_f_minus_alpha_j;
  double max_abs() const;
};

// D_mu U = Y_mu U - [B_mu, U].
Multivectord gauge_covariant_derivative(const MultivectorField& u, const GaugeField& b, int mu, const Point& x,
                                        const MetricField& mf, double h = 1e-3);

UtResidual residual_ut(const DiracState& st, const MaxwellState& ms, const Point& x, const MetricField& mf,
                       double h = 1e-3);

// --- Minkowski space ---------------------------------------------------------

// Psi = Psi0 exp(-sign p_nu x^nu I), H = dx^0, I = dx^1 ^ dx^2, a = B = 0, with
// sign * p_mu dx^mu Psi0 = m Psi0 H. `p` holds the lower components p_mu.
DiracState planewave_solve(const Eigen::Vector4d& p, double m, int sign = 1);

// The 8x8 matrix of Psi0 -> p_mu dx^mu Psi0 - m Psi0 H from even to odd coefficients.
Eigen::Matrix<double, 8, 8> planewave_matrix(const Eigen::Vector4d& p, double m, const Multivectord& h);

// Even coefficients <-> multivector.
Eigen::Matrix<double, 8, 1> even_coefficients(const Multivectord& u);
Multivectord from_even_coefficients(const Eigen::Matrix<double, 8, 1>& c);

// Applies gauge_spin with S = U^-1. Requires B_mu = -U^-1 d_mu U at the
// sample points of the Minkowski box (PreconditionViolation otherwise).
DiracState minkowski_gauge_fix(const DiracState& st, const GaugeElement& u, const MetricField& mf,
                               double h = 1e-3);

// Pure-gauge field: grade-2 part of -U^-1 d_mu U (flat space).
GaugeField pure_gauge_b(const GaugeElement& u, const MetricField& mf, double h = 1e-3);

struct TdeResidual {
  Multivectord first_line;            // dx^mu (d_mu Psi + Psi I a_mu) + m Psi H I
  std::array<Multivectord, 4> d_h;    // d_mu H
  std::array<Multivectord, 4> d_i;    // d_mu I
  double b_max = 0.0;                 // max |B_mu|
  Multivectord h_squared;
  Multivectord i_squared;
  Multivectord h_i_commutator;
  double max_abs() const;
};

TdeResidual residual_tde(const DiracState& st, const Point& x, const MetricField& mf, double h = 1e-3);

// --- test states ---------------------------------------------------------------

// Smooth Spin field. On constant metrics it is a product of simple rotations
// and boosts with analytic partials; otherwise exp of a smooth 2-form field
// under the local metric.
GaugeElement random_spin_field(Rng& rng, const MetricField& mf, double amplitude = 0.6);

// Random state satisfying the H, I constraints: H = theta^0, I = theta^1 theta^2
// for the orthonormal coframe of mf and B from the coframe connection, then
// conjugated by a random Spin field when `conjugate` is set. Psi and a_mu are
// random smooth fields; m is drawn from [0.5, 1.5].
DiracState random_state(Rng& rng, const MetricField& mf, bool conjugate = true, double h = 1e-3);

}  // namespace tdirac
