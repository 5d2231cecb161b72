#pragma once

#include <array>

#include "tdirac/field.hpp"
#include "tdirac/geometry.hpp"

namespace tdirac {

// E with g = E^T eta E from the unpivoted LDL^T factorization of g; the rows
// of E are the components of an orthonormal coframe theta^a = E(a, mu) dx^mu.
// Throws PreconditionViolation when the pivots are not (+, -, -, -).
Eigen::Matrix4d orthonormal_coframe(const Eigen::Matrix4d& g);

// theta^a as a 1-form field.
MultivectorField coframe_field(const MetricField& mf, int a);

// B_mu with [B_mu, theta^a] = Upsilon_mu theta^a for every a (least squares
// over the 2-forms). Then Upsilon_mu H = [B_mu, H] and Upsilon_mu I = [B_mu, I]
// hold for H = theta^0 and I = theta^1 theta^2.
std::array<MultivectorField, 4> coframe_connection(const MetricField& mf, double h = 1e-3);

// Matrix of b -> [b, v] from 2-form coefficients (6) to grade-1 coefficients (4).
Eigen::Matrix<double, 4, 6> bivector_commutator_matrix(const Multivectord& v, const MetricAtPointd& m);

}  // namespace tdirac
