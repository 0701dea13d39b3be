#include "hdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hdg {

namespace {

constexpr int kMaxOrder = 60;

// Golub-Welsch nodes/weights for the Jacobi weight (1-x)^a (1+x)^b on [-1,1].
void gauss_jacobi(int n, double a, double b, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double k = i;
    const double denom = (2 * k + a + b) * (2 * k + a + b + 2);
    J(i, i) = (denom == 0) ? (b - a) / (a + b + 2) : (b * b - a * a) / denom;
    if (i + 1 < n) {
      const double m = k + 1;
      const double num = 4 * m * (m + a) * (m + b) * (m + a + b);
      const double den = (2 * m + a + b - 1) * std::pow(2 * m + a + b, 2) * (2 * m + a + b + 1);
      J(i, i + 1) = J(i + 1, i) = std::sqrt(num / den);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  const double mu0 = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) /
                     std::tgamma(a + b + 2);
  w.resize(n);
  for (int i = 0; i < n; ++i) w(i) = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
}

} // namespace

QuadratureRule quadrature_rule(DomainKind kind, int order) {
  if (order < 0) throw std::runtime_error("quadrature: order must be >= 0");
  if (order > kMaxOrder)
    throw std::runtime_error("quadrature: order " + std::to_string(order) +
                             " above implemented maximum " + std::to_string(kMaxOrder));
  const int m = order / 2 + 1; // m-point Gauss exact to degree 2m-1 >= order

  QuadratureRule rule;
  if (kind == DomainKind::edge) {
    Eigen::VectorXd x, w;
    gauss_jacobi(m, 0, 0, x, w);
    rule.points.resize(m, 2);
    rule.weights.resize(m);
    for (int i = 0; i < m; ++i) {
      rule.points(i, 0) = 0.5 * (x(i) + 1.0);
      rule.points(i, 1) = 0;
      rule.weights(i) = 0.5 * w(i);
    }
    return rule;
  }

  // conical product on the triangle: x from Gauss-Jacobi (weight 1-x),
  // y = (1-x) u with u from Gauss-Legendre
  Eigen::VectorXd xj, wj, xl, wl;
  gauss_jacobi(m, 1, 0, xj, wj);
  gauss_jacobi(m, 0, 0, xl, wl);
  rule.points.resize(m * m, 2);
  rule.weights.resize(m * m);
  int q = 0;
  for (int i = 0; i < m; ++i) {
    const double x = 0.5 * (xj(i) + 1.0);
    const double wx = 0.25 * wj(i); // (1/4) from mapping weight (1-x) dx to [-1,1]
    for (int j = 0; j < m; ++j) {
      const double u = 0.5 * (xl(j) + 1.0);
      rule.points(q, 0) = x;
      rule.points(q, 1) = (1.0 - x) * u;
      rule.weights(q) = wx * 0.5 * wl(j);
      ++q;
    }
  }
  return rule;
}

} // namespace hdg
