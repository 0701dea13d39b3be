#include "hdg/block_system.hpp"

#include <stdexcept>

namespace hdg {

BlockSystem::BlockSystem(int n_cells, int n_int_per_cell, int n_trace)
    : ni_(n_int_per_cell), nt_(n_trace), cells_(n_cells) {
  r_trace_ = Eigen::VectorXd::Zero(n_trace);
}

void BlockSystem::set_cell(int cell, Eigen::MatrixXd A, Eigen::MatrixXd C, Eigen::MatrixXd B,
                           Eigen::VectorXd r_int, std::vector<int> cols) {
  Cell& c = cells_[cell];
  const auto nc = static_cast<Eigen::Index>(cols.size());
  if (A.rows() != ni_ || A.cols() != ni_ || C.rows() != ni_ || C.cols() != nc ||
      B.rows() != nc || B.cols() != ni_ || r_int.size() != ni_)
    throw std::runtime_error("BlockSystem::set_cell: inconsistent block dimensions");
  c.A = std::move(A);
  c.C = std::move(C);
  c.B = std::move(B);
  c.r_int = std::move(r_int);
  c.cols = std::move(cols);
  c.factored = false;
}

void BlockSystem::add_trace(int row, int col, double value) {
  trace_triplets_.emplace_back(row, col, value);
}

double BlockSystem::interior_residual_norm() const {
  double s = 0.0;
  for (const Cell& c : cells_) s += c.r_int.squaredNorm();
  return std::sqrt(s);
}

void BlockSystem::factor_cells() {
  for (Cell& c : cells_) {
    if (c.factored) continue;
    c.lu.compute(c.A);
    // PartialPivLU has no info(); detect breakdown via the diagonal
    if (!c.lu.matrixLU().diagonal().array().isFinite().all() ||
        (c.lu.matrixLU().diagonal().array() == 0.0).any())
      throw std::runtime_error("BlockSystem: singular interior block");
    c.factored = true;
  }
}

std::pair<Eigen::SparseMatrix<double>, Eigen::VectorXd> BlockSystem::build_condensed() {
  factor_cells();
  std::vector<Eigen::Triplet<double>> trips = trace_triplets_;
  Eigen::VectorXd rhs = -r_trace_;
  for (Cell& c : cells_) {
    const Eigen::MatrixXd AinvC = c.lu.solve(c.C);
    const Eigen::MatrixXd M = c.B * AinvC; // B A^{-1} C
    const Eigen::VectorXd v = c.B * c.lu.solve(c.r_int);
    const int nc = static_cast<int>(c.cols.size());
    for (int i = 0; i < nc; ++i) {
      rhs[c.cols[i]] += v[i];
      for (int j = 0; j < nc; ++j) trips.emplace_back(c.cols[i], c.cols[j], -M(i, j));
    }
  }
  Eigen::SparseMatrix<double> S(nt_, nt_);
  S.setFromTriplets(trips.begin(), trips.end());
  schur_nnz_ = static_cast<int>(S.nonZeros());
  return {std::move(S), std::move(rhs)};
}

std::pair<Eigen::SparseMatrix<double>, Eigen::VectorXd> BlockSystem::condensed_system() {
  return build_condensed();
}

Eigen::VectorXd BlockSystem::solve_condensed() {
  auto [S, rhs] = build_condensed();
  if (border_pivot_ < 0 || nt_ < 2) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("BlockSystem: condensed trace factorization failed");
    Eigen::VectorXd d = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("BlockSystem: condensed trace solve failed");
    d += lu.solve(rhs - S * d); // one step of iterative refinement
    return d;
  }

  // bordered solve: the last unknown couples densely (mean-value multiplier)
  // and would wreck the sparse ordering. Eliminate it by hand. The trimmed
  // block is singular (that is why the multiplier exists), so it is
  // regularized by pinning the pivot unknown and the pin is undone exactly
  // through a 2x2 correction system.
  const int m = nt_ - 1, p = border_pivot_;
  Eigen::VectorXd b(m), c(m);
  for (int j = 0; j < m; ++j) {
    b[j] = S.coeff(m, j);
    c[j] = S.coeff(j, m);
  }
  const double delta = S.coeff(m, m);
  double gamma = 1.0;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(S.nonZeros());
  for (int k = 0; k < S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, k); it; ++it) {
      if (it.row() == m || it.col() == m) continue;
      trips.emplace_back(it.row(), it.col(), it.value());
      if (it.row() == it.col()) gamma = std::max(gamma, std::abs(it.value()));
    }
  trips.emplace_back(p, p, gamma);
  Eigen::SparseMatrix<double> K(m, m);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("BlockSystem: bordered trace factorization failed");
  const Eigen::VectorXd z = lu.solve(c);
  Eigen::VectorXd ep = Eigen::VectorXd::Zero(m);
  ep[p] = 1.0;
  const Eigen::VectorXd w = lu.solve(ep);
  const auto bordered = [&](const Eigen::VectorXd& full_rhs) {
    const Eigen::VectorXd y = lu.solve(full_rhs.head(m));
    Eigen::Matrix2d M;
    M << delta - b.dot(z), gamma * b.dot(w), -z[p], gamma * w[p] - 1.0;
    const Eigen::Vector2d q = M.partialPivLu().solve(
        Eigen::Vector2d(full_rhs[m] - b.dot(y), -y[p]));
    Eigen::VectorXd d(nt_);
    d.head(m) = y - q[0] * z + gamma * q[1] * w;
    d[m] = q[0];
    return d;
  };
  Eigen::VectorXd d = bordered(rhs);
  d += bordered(rhs - S * d); // one step of iterative refinement
  return d;
}

Eigen::VectorXd BlockSystem::recover_interior(const Eigen::VectorXd& d_trace) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(ni_) * n_cells());
  for (int e = 0; e < n_cells(); ++e) {
    const Cell& c = cells_[e];
    if (!c.factored) throw std::runtime_error("BlockSystem: recover before solve");
    Eigen::VectorXd dt(c.cols.size());
    for (size_t i = 0; i < c.cols.size(); ++i) dt[static_cast<Eigen::Index>(i)] = d_trace[c.cols[i]];
    out.segment(static_cast<Eigen::Index>(e) * ni_, ni_) = c.lu.solve(-c.r_int - c.C * dt);
  }
  return out;
}

Eigen::VectorXd BlockSystem::interior_residual() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(ni_) * n_cells());
  for (int e = 0; e < n_cells(); ++e)
    out.segment(static_cast<Eigen::Index>(e) * ni_, ni_) = cells_[e].r_int;
  return out;
}

Eigen::SparseMatrix<double> BlockSystem::full_matrix() const {
  const Eigen::Index n_int = static_cast<Eigen::Index>(ni_) * n_cells();
  const Eigen::Index n = n_int + nt_;
  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < n_cells(); ++e) {
    const Cell& c = cells_[e];
    const Eigen::Index base = static_cast<Eigen::Index>(e) * ni_;
    for (int i = 0; i < ni_; ++i)
      for (int j = 0; j < ni_; ++j)
        if (c.A(i, j) != 0.0) trips.emplace_back(base + i, base + j, c.A(i, j));
    for (int i = 0; i < ni_; ++i)
      for (size_t j = 0; j < c.cols.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (c.C(i, jj) != 0.0) trips.emplace_back(base + i, n_int + c.cols[j], c.C(i, jj));
        if (c.B(jj, i) != 0.0) trips.emplace_back(n_int + c.cols[j], base + i, c.B(jj, i));
      }
  }
  for (const auto& t : trace_triplets_)
    trips.emplace_back(n_int + t.row(), n_int + t.col(), t.value());
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> BlockSystem::solve_monolithic() const {
  const Eigen::Index n_int = static_cast<Eigen::Index>(ni_) * n_cells();
  const Eigen::Index n = n_int + nt_;
  Eigen::VectorXd rhs(n);
  rhs.head(n_int) = -interior_residual();
  rhs.tail(nt_) = -r_trace_;
  const Eigen::SparseMatrix<double> K = full_matrix();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("BlockSystem: monolithic factorization failed");
  Eigen::VectorXd sol = lu.solve(rhs);
  sol += lu.solve(rhs - K * sol); // one step of iterative refinement
  return {sol.head(n_int), sol.tail(nt_)};
}

} // namespace hdg
