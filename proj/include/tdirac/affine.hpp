#pragma once

#include <array>
#include <functional>
#include <string>

#include "tdirac/dirac.hpp"
#include "tdirac/geometry.hpp"
#include "tdirac/io.hpp"
#include "tdirac/random.hpp"

namespace tdirac {

// Contorsion K_{lmn} (all indices lowered) stored as k[l](m, n); the mixed
// form is K^l_{mn} = g^{lk} K_{kmn}. Metric compatibility: K_{nml} = -K_{lmn}.
class ContorsionField {
 public:
  using LowerFn = std::function<Rank3(const Point&)>;

  // Throws IncompatibleContorsion if compatibility fails at any probe point.
  ContorsionField(LowerFn lower, const std::vector<Point>& probes, bool exact = true);

  static ContorsionField zero();

  Rank3 lower(const Point& x) const { return lower_(x); }
  Rank3 mixed(const Point& x, const MetricField& mf) const;
  bool exact() const { return exact_; }

 private:
  LowerFn lower_;
  bool exact_ = true;
};

double compatibility_defect(const Rank3& lower);
void require_compatible(const Rank3& lower, double tol = 1e-12);

Rank3 raise_first(const Rank3& lower, const Eigen::Matrix4d& ginv);
Rank3 lower_first(const Rank3& mixed, const Eigen::Matrix4d& g);

// b_{abm} = -1/2 K_{amb}, B_m = 1/2 b_{abm} dx^a ^ dx^b.
std::array<Multivectord, 4> b_from_contorsion(const Rank3& lower);
std::array<Multivectord, 4> b_from_contorsion(const ContorsionField& k, const Point& x);
GaugeField gauge_field_from_contorsion(const ContorsionField& k);

// Inverse dictionary: K_{amb} = -2 b_{abm}. Throws GradeError when a B_m has
// components outside grade 2 above 1e-12 relative.
Rank3 contorsion_from_b(const std::array<Multivectord, 4>& b);
// Wraps a gauge field as a contorsion field (values of the gauge field are
// converted pointwise).
ContorsionField contorsion_field_from_gauge(const GaugeField& b, const std::vector<Point>& probes);

// K^n_{ml} read off from [B_m, dx^n] = K^n_{ml} dx^l.
Rank3 contorsion_from_commutators(const std::array<Multivectord, 4>& b, const MetricAtPointd& m);

// T^l_{mn} = K^l_{mn} - K^l_{nm} (mixed indices).
Rank3 torsion_from_contorsion(const Rank3& mixed);
// K^l_{mn} = 1/2 (T^l_{mn} + T_m^l_n + T_n^l_m). Throws PreconditionViolation
// unless T is antisymmetric in its lower pair.
Rank3 contorsion_from_torsion(const Rank3& torsion_mixed, const MetricAtPointd& m, double tol = 1e-12);

// Gamma-check = Gamma + K and its coordinate derivatives d_r as out[r][l](m, n).
Rank3 affine_connection(const ContorsionField& k, const Point& x, const MetricField& mf, double h = 1e-3);
Rank4 affine_connection_derivative(const ContorsionField& k, const Point& x, const MetricField& mf, double h = 1e-3);

// max |nabla-check_k g_{mn}|.
double affine_metric_defect(const ContorsionField& k, const Point& x, const MetricField& mf, double h = 1e-3);

// Y-check_mu U - (Y_mu U - [B_mu, U]), where Y-check uses Gamma + K.
Multivectord affine_derivative_residual(const MultivectorField& u, const ContorsionField& k, const Point& x,
                                        const MetricField& mf, int mu, double h = 1e-3);

// R-check_{abmn} = g_{ka} (d_m G^k_{nb} - d_n G^k_{mb} + G^k_{me} G^e_{nb} - G^k_{ne} G^e_{mb})
// with G = Gamma + K, as out[a][b](m, n).
Rank4 affine_curvature(const ContorsionField& k, const Point& x, const MetricField& mf, double h = 1e-3);

struct FlatnessCheck {
  Rank4 q;       // 1/2 q_{abmn} dx^a ^ dx^b = Y_m B_n - Y_n B_m - [B_m, B_n] - 1/2 C_{mn}
  Rank4 rcheck;  // affine curvature, lowered
  double residual = 0.0;  // max |R-check + 2 q|
  double scale = 0.0;     // max(|q|, |R-check|)
};

FlatnessCheck flatness_check(const ContorsionField& k, const Point& x, const MetricField& mf, double h = 1e-3);

struct PureGauge {
  std::array<Multivectord, 4> b;  // grade-2 part of -U^-1 d_mu U
  double leakage = 0.0;           // largest coefficient outside grade 2 before projection
};

// Requires the Minkowski metric and U in Spin at x (PreconditionViolation / NotSpin).
PureGauge spin_pure_gauge_b(const GaugeElement& u, const Point& x, const MetricField& mf, double h = 1e-3);

// Each lowered component b_{abm} (a < b) is c0 + sum_j amp sin(k_j . x + phase_j);
// the contorsion follows from the dictionary, so it is compatible by construction.
ContorsionField random_contorsion(Rng& rng, const ChartBox& box, double amplitude = 0.3, double wavenumber = 1.0);

// {"b": [64 numbers]} for constant b_{abm} (flat index 16 a + 4 b + m), or
// {"box": {...}, "b": [[64 numbers] per grid node]} for multilinear samples.
ContorsionField contorsion_from_json(const Json& j);
ContorsionField load_contorsion(const std::string& path);

}  // namespace tdirac
