#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

namespace hdg {

/// Linearized saddle system in cell-bordered form
///     [ A  C ] [ d_int   ]   [ -r_int   ]
///     [ B  D ] [ d_trace ] = [ -r_trace ]
/// where A is block diagonal over cells and the trace unknowns couple cells.
/// Each cell contributes dense blocks A_e, C_e, B_e over its own interior DOFs
/// and the solved trace columns it touches; D and r_trace are global.
///
/// solve_condensed eliminates the interiors per cell:
///     S = D - B A^{-1} C,   S d_trace = -r_trace + B A^{-1} r_int,
/// then recover_interior back-substitutes d_int = A^{-1}(-r_int - C d_trace).
class BlockSystem {
public:
  BlockSystem(int n_cells, int n_int_per_cell, int n_trace);

  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_int_per_cell() const { return ni_; }
  int n_trace() const { return nt_; }

  /// dense cell contribution; cols are global solved-trace indices,
  /// A: ni x ni, C: ni x |cols|, B: |cols| x ni, r_int: ni
  void set_cell(int cell, Eigen::MatrixXd A, Eigen::MatrixXd C, Eigen::MatrixXd B,
                Eigen::VectorXd r_int, std::vector<int> cols);

  void add_trace(int row, int col, double value);
  void add_trace_rhs(int row, double value) { r_trace_[row] += value; }
  Eigen::VectorXd& trace_rhs() { return r_trace_; }

  double interior_residual_norm() const;
  double trace_residual_norm() const { return r_trace_.norm(); }
  /// stacked per-cell interior residual (ni per cell)
  Eigen::VectorXd interior_residual() const;
  /// assembled [[A, C], [B, D]] (interior block first)
  Eigen::SparseMatrix<double> full_matrix() const;

  /// declare the last trace unknown a dense border (e.g. a mean-value
  /// multiplier): it is eliminated by a bordered solve so the sparse
  /// factorization never sees its dense row/column. pivot must be the index
  /// of a trace unknown outside the border's null space (any pressure trace
  /// for the mean-pressure constraint).
  void set_dense_border(int pivot) { border_pivot_ = pivot; }

  /// trace increment via static condensation; factors each A_e and the Schur
  /// complement. Throws on a singular factorization.
  Eigen::VectorXd solve_condensed();
  /// interior increments (cell-contiguous, ni per cell); requires a preceding
  /// solve_condensed (the A_e factorizations are reused)
  Eigen::VectorXd recover_interior(const Eigen::VectorXd& d_trace) const;

  /// assemble and solve the uncondensed system directly (verification path)
  std::pair<Eigen::VectorXd, Eigen::VectorXd> solve_monolithic() const;

  /// condensed operator and right-hand side without solving (diagnostics)
  std::pair<Eigen::SparseMatrix<double>, Eigen::VectorXd> condensed_system();
  int schur_nonzeros() const { return schur_nnz_; }

private:
  struct Cell {
    Eigen::MatrixXd A, C, B;
    Eigen::VectorXd r_int;
    std::vector<int> cols;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool factored = false;
  };
  int ni_, nt_;
  std::vector<Cell> cells_;
  std::vector<Eigen::Triplet<double>> trace_triplets_;
  Eigen::VectorXd r_trace_;
  int schur_nnz_ = 0;
  int border_pivot_ = -1;

  void factor_cells();
  std::pair<Eigen::SparseMatrix<double>, Eigen::VectorXd> build_condensed();
};

} // namespace hdg
