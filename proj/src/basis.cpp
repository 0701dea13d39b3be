#include "hdg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hdg {

namespace {

// exact monomial integrals on the reference domains
double tri_moment(int a, int b) {
  // int_T x^a y^b = a! b! / (a+b+2)!
  return std::exp(std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 3));
}

double edge_moment(int a) { return 1.0 / (a + 1); }

double ipow(double x, int n) {
  double r = 1;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

} // namespace

Basis::Basis(DomainKind kind, int degree) : kind_(kind), degree_(degree) {
  if (degree < 0) throw std::runtime_error("basis: degree must be >= 0");
  if (kind == DomainKind::triangle) {
    for (int t = 0; t <= degree; ++t)
      for (int a = t; a >= 0; --a) exps_.push_back({a, t - a});
  } else {
    for (int a = 0; a <= degree; ++a) exps_.push_back({a, 0});
  }
  const int n = size();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) = (kind == DomainKind::triangle)
                       ? tri_moment(exps_[i][0] + exps_[j][0], exps_[i][1] + exps_[j][1])
                       : edge_moment(exps_[i][0] + exps_[j][0]);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("basis: Gram factorization failed");
  // phi = L^{-1} m  =>  int phi phi^T = L^{-1} G L^{-T} = I
  coeff_ = Eigen::MatrixXd(llt.matrixL())
               .triangularView<Eigen::Lower>()
               .solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd Basis::values(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const {
  const int nq = static_cast<int>(pts.rows()), n = size();
  Eigen::MatrixXd mono(nq, n);
  for (int q = 0; q < nq; ++q)
    for (int i = 0; i < n; ++i)
      mono(q, i) = ipow(pts(q, 0), exps_[i][0]) * ipow(pts(q, 1), exps_[i][1]);
  return mono * coeff_.transpose();
}

Eigen::MatrixXd Basis::gradients(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const {
  const int nq = static_cast<int>(pts.rows()), n = size();
  const int rows_per_pt = (kind_ == DomainKind::triangle) ? 2 : 1;
  Eigen::MatrixXd mono(nq * rows_per_pt, n);
  for (int q = 0; q < nq; ++q)
    for (int i = 0; i < n; ++i) {
      const int a = exps_[i][0], b = exps_[i][1];
      mono(rows_per_pt * q, i) = a == 0 ? 0.0 : a * ipow(pts(q, 0), a - 1) * ipow(pts(q, 1), b);
      if (rows_per_pt == 2)
        mono(2 * q + 1, i) = b == 0 ? 0.0 : b * ipow(pts(q, 0), a) * ipow(pts(q, 1), b - 1);
    }
  return mono * coeff_.transpose();
}

Eigen::MatrixXd Basis::hessians(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const {
  if (kind_ != DomainKind::triangle) throw std::runtime_error("basis: hessians are triangle-only");
  const int nq = static_cast<int>(pts.rows()), n = size();
  Eigen::MatrixXd mono(nq * 3, n);
  for (int q = 0; q < nq; ++q)
    for (int i = 0; i < n; ++i) {
      const int a = exps_[i][0], b = exps_[i][1];
      const double x = pts(q, 0), y = pts(q, 1);
      mono(3 * q + 0, i) = a < 2 ? 0.0 : double(a) * (a - 1) * ipow(x, a - 2) * ipow(y, b);
      mono(3 * q + 1, i) = (a < 1 || b < 1) ? 0.0 : double(a) * b * ipow(x, a - 1) * ipow(y, b - 1);
      mono(3 * q + 2, i) = b < 2 ? 0.0 : double(b) * (b - 1) * ipow(x, a) * ipow(y, b - 2);
    }
  return mono * coeff_.transpose();
}

} // namespace hdg
