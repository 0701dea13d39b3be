#pragma once

#include "hdg/quadrature.hpp"

#include <Eigen/Dense>

namespace hdg {

/// Orthonormalized monomial basis on the reference triangle or edge:
/// phi_i = sum_j C(i,j) m_j with int_ref phi_i phi_j = delta_ij.
/// Dimension: (d+1)(d+2)/2 on the triangle, d+1 on the edge.
class Basis {
public:
  Basis(DomainKind kind, int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exps_.size()); }
  DomainKind kind() const { return kind_; }

  /// values(q, i) = phi_i at point q
  Eigen::MatrixXd values(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const;
  /// gradients in reference coordinates: [d/dxi, d/deta] stacked as two blocks
  /// of rows: row 2q is d/dxi at point q, row 2q+1 is d/deta (edge: d/ds only,
  /// one row per point)
  Eigen::MatrixXd gradients(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const;
  /// second derivatives, rows per point: [dxx, dxy, dyy] (triangle only)
  Eigen::MatrixXd hessians(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const;

private:
  DomainKind kind_;
  int degree_;
  std::vector<std::array<int, 2>> exps_; // monomial exponents
  Eigen::MatrixXd coeff_;                // orthonormalization, lower triangular
};

} // namespace hdg
