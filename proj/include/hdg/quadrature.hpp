#pragma once

#include <Eigen/Dense>

namespace hdg {

enum class DomainKind { triangle, edge };

/// Reference-domain quadrature: unit triangle (0,0)-(1,0)-(0,1) or unit edge [0,1].
/// All weights are positive; rules integrate polynomials up to the requested
/// total degree exactly.
struct QuadratureRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points; // edge rules use column 0 only
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(weights.size()); }
};

QuadratureRule quadrature_rule(DomainKind kind, int exactness_order);

} // namespace hdg
