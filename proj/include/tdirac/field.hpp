#pragma once

#include <array>
#include <functional>
#include <memory>

#include "tdirac/algebra.hpp"
#include "tdirac/geometry.hpp"
#include "tdirac/multivector.hpp"
#include "tdirac/random.hpp"

namespace tdirac {

using Partials = std::array<Multivectord, 4>;

// A chart-domain function x -> Multivector.
//
// `exact` says the value itself carries no finite-difference error (it is a
// closed-form closure, possibly composed with pointwise algebra). Fields whose
// values contain a central-difference quotient are differenced with the same
// step h and checked against the nested_fd tier.
class MultivectorField {
 public:
  using EvalFn = std::function<Multivectord(const Point&)>;
  using PartialsFn = std::function<Partials(const Point&)>;

  MultivectorField();
  explicit MultivectorField(EvalFn eval, PartialsFn partials = {}, bool exact = true);

  static MultivectorField constant(const Multivectord& value);

  Multivectord operator()(const Point& x) const { return eval_(x); }

  bool has_analytic_partials() const { return static_cast<bool>(partials_); }
  bool exact() const { return exact_; }

  // d_mu of the coefficients, analytic when available.
  Partials partials(const Point& x, const ChartBox& box, double h) const;
  Multivectord partial(int mu, const Point& x, const ChartBox& box, double h) const;
  double fd_step(double h) const;

  const EvalFn& eval_fn() const { return eval_; }
  const PartialsFn& partials_fn() const { return partials_; }

 private:
  EvalFn eval_;
  PartialsFn partials_;
  bool exact_ = true;
};

// Scalar-valued fields are grade-0 multivector fields.
using ScalarField = MultivectorField;

MultivectorField operator+(const MultivectorField& a, const MultivectorField& b);
MultivectorField operator-(const MultivectorField& a, const MultivectorField& b);
MultivectorField operator*(double s, const MultivectorField& a);
// f(x) * U(x) for a grade-0 field f.
MultivectorField scalar_times(const ScalarField& f, const MultivectorField& u);

// Pointwise Clifford product under the metric field. Analytic partials are
// propagated only when the metric is constant (the product itself depends on
// g(x) otherwise).
MultivectorField product(const MultivectorField& a, const MultivectorField& b, const MetricField& mf);
MultivectorField reversion(const MultivectorField& a);
MultivectorField hodge_star(const MultivectorField& a, const MetricField& mf);
MultivectorField grade_project(const MultivectorField& a, int k);

// Closed-form random test fields with analytic partials:
// each selected coefficient is c0 + sum_j amp_j sin(k_j . x + phase_j).
MultivectorField random_smooth_field(Rng& rng, std::initializer_list<int> grades, double amplitude = 1.0,
                                     double wavenumber = 1.0);
// Each selected coefficient is a random quadratic polynomial in x.
MultivectorField random_quadratic_field(Rng& rng, std::initializer_list<int> grades, double amplitude = 1.0);
// Smooth scalar field as a grade-0 multivector field.
ScalarField random_scalar_field(Rng& rng, double amplitude = 1.0, double wavenumber = 1.0);

}  // namespace tdirac
