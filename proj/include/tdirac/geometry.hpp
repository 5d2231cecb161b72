#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tdirac/metric.hpp"
#include "tdirac/multivector.hpp"

namespace tdirac {

class Rng;

// r[a](b, c)
using Rank3 = std::array<Eigen::Matrix4d, 4>;
// r[a][b](c, d)
using Rank4 = std::array<std::array<Eigen::Matrix4d, 4>, 4>;

Rank3 zero_rank3();
Rank4 zero_rank4();

// Axis-aligned region of the single chart, with grid sample counts for sweeps.
struct ChartBox {
  Point lo = Point::Constant(-1.0);
  Point hi = Point::Constant(1.0);
  std::array<int, 4> n = {3, 3, 3, 3};

  bool contains(const Point& x) const;
  // Every grid node, last coordinate fastest.
  std::vector<Point> nodes() const;
  // Uniform random point at least `margin` away from every face.
  Point random_interior(Rng& rng, double margin) const;
  void validate() const;
};

// d_k g_{mn} stored as dg[k](m, n).
using MetricGradient = std::array<Eigen::Matrix4d, 4>;
// d_k d_l g_{mn} stored as d2g[k][l](m, n).
using MetricHessian = std::array<std::array<Eigen::Matrix4d, 4>, 4>;

// A metric over a chart box. Derivatives come from the analytic closures when
// the family provides them and from central differences otherwise.
class MetricField {
 public:
  using ValueFn = std::function<Eigen::Matrix4d(const Point&)>;
  using GradientFn = std::function<MetricGradient(const Point&)>;
  using HessianFn = std::function<MetricHessian(const Point&)>;

  MetricField(std::string label, ChartBox box, ValueFn g, GradientFn dg = {}, HessianFn d2g = {});

  const std::string& label() const { return label_; }
  const ChartBox& box() const { return box_; }
  // Restricts sweeps and stencil checks to a different region of the chart.
  MetricField& set_box(const ChartBox& box) {
    box.validate();
    box_ = box;
    return *this;
  }
  bool has_analytic_gradient() const { return static_cast<bool>(dg_); }
  bool has_analytic_hessian() const { return static_cast<bool>(d2g_); }

  // Constant metrics allow analytic product rules for fields.
  bool is_constant() const { return constant_; }
  MetricField& mark_constant(bool c = true) {
    constant_ = c;
    return *this;
  }
  // Grid-interpolated metrics are flagged as lower accuracy in reports.
  bool is_interpolated() const { return interpolated_; }
  MetricField& mark_interpolated(bool c = true) {
    interpolated_ = c;
    return *this;
  }
  // Parameter echo for reports, e.g. "flrw:1,0.1".
  const std::string& descriptor() const { return descriptor_; }
  MetricField& set_descriptor(std::string s) {
    descriptor_ = std::move(s);
    return *this;
  }

  Eigen::Matrix4d g_raw(const Point& x) const { return g_(x); }
  // Validated metric at x (throws MetricAxiomViolation).
  MetricAtPointd at(const Point& x) const;

  // First partials; `h` is used only when no analytic gradient exists.
  MetricGradient gradient(const Point& x, double h) const;
  MetricGradient gradient_fd(const Point& x, double h) const;
  MetricHessian hessian(const Point& x, double h) const;

  // Throws MetricAxiomViolation naming the first offending grid node.
  void validate_on_grid() const;

 private:
  std::string label_;
  std::string descriptor_;
  ChartBox box_;
  ValueFn g_;
  GradientFn dg_;
  HessianFn d2g_;
  bool constant_ = false;
  bool interpolated_ = false;
};

// Throws BoundaryError unless x +- step*e_k stays in the box for every k.
void require_stencil(const ChartBox& box, const Point& x, double step);

// Gamma^l_{mn} stored as gamma[l](m, n); symmetric in (m, n) by construction.
struct ChristoffelAtPoint {
  Rank3 gamma;
  double operator()(int l, int m, int n) const { return gamma[l](m, n); }
};

struct CurvatureAtPoint {
  Rank4 mixed;  // R^k_{lmn} as mixed[k][l](m, n)
  Rank4 lower;  // R_{abmn} = g_{ka} R^k_{bmn} as lower[a][b](m, n)
  std::array<std::array<Multivectord, 4>, 4> c2form;  // C_{mn} = 1/2 R_{abmn} dx^a ^ dx^b
};

// Levi-Civita symbols 1/2 g^{lk}(d_m g_{nk} + d_n g_{mk} - d_k g_{mn}).
ChristoffelAtPoint christoffel(const MetricField& mf, const Point& x, double h = 1e-3);
ChristoffelAtPoint christoffel_from(const MetricAtPointd& m, const MetricGradient& dg);

// d_r Gamma^l_{mn} as out[r][l](m, n). Analytic when the metric has a Hessian,
// otherwise a central difference of christoffel().
Rank4 christoffel_derivative(const MetricField& mf, const Point& x, double h = 1e-3);

// R^k_{lmn} = d_m G^k_{nl} - d_n G^k_{ml} + G^k_{me} G^e_{nl} - G^k_{ne} G^e_{ml}
// for an arbitrary connection given with its derivative.
Rank4 curvature_from_connection(const Rank3& gamma, const Rank4& dgamma);

CurvatureAtPoint riemann(const MetricField& mf, const Point& x, double h = 1e-3);

// --- catalog ---------------------------------------------------------------

struct CatalogEntry {
  std::string name;
  std::string parameters;
  std::string description;
};

std::vector<CatalogEntry> catalog_entries();

// name in {minkowski, flrw, polynomial, conformal}; params as documented in
// catalog_entries(). Throws UnknownMetric / ConfigError.
MetricField metric_catalog(const std::string& name, const std::vector<double>& params = {});

// "flrw:1,0.1" -> metric_catalog("flrw", {1, 0.1}); "sampled:<path>" loads JSON.
MetricField metric_from_descriptor(const std::string& text);

// Multilinear interpolation weights (node index in ChartBox::nodes() order, weight).
std::vector<std::pair<std::size_t, double>> grid_weights(const ChartBox& box, const Point& x);

// Metric sampled on a regular grid, interpolated multilinearly.
// samples[node] is the row-major g at ChartBox::nodes()[node].
MetricField sampled_metric(const ChartBox& box, const std::vector<Eigen::Matrix4d>& samples);

// Metric in new coordinates xt = J x + c (constant Jacobian, det J > 0).
MetricField transformed_metric(const MetricField& mf, const Eigen::Matrix4d& jacobian, const Point& shift);

}  // namespace tdirac
