#pragma once

#include "hdg/basis.hpp"
#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>

namespace hdg {

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

enum class FieldKind { velocity, pressure, viscosity };

struct SpaceOptions {
  int k_flow = 2;  // velocity degree; pressure and trace degrees follow Eq-of-spaces rules
  int q_visc = -1; // working-viscosity degree, default k_flow - 1
  int cell_quad_order = -1;  // default 2*max(k,q)+2
  int facet_quad_order = -1; // default 2*max(k,q)+1
  // -1 auto: enabled iff the mesh has no Neumann boundary facets
  int pressure_mean_constraint = -1;
  // per-tag overrides of the scalar-field boundary kind (default: same as flow)
  std::map<std::string, BoundaryKind> scalar_kind_override;
};

/// Affine geometry of one cell, cached.
struct CellGeom {
  Vec2 x0;
  Mat2 jac, jac_inv;
  double det_jac; // = 2*area
  double area;
  double h; // Area/Perimeter
  std::array<Vec2, 3> facet_normal;
  std::array<double, 3> facet_length;
};

/// Polynomial spaces, quadrature, basis tables, and DOF maps for the six
/// discrete spaces (interior velocity/pressure/viscosity and their traces).
///
/// Interior DOF layout: velocity cell block = [x-comp coefs (nv), y-comp (nv)]
/// at cell*2*nv; pressure block np at cell*np; viscosity nw at cell*nw.
/// Flow trace full layout per facet f: [ux (nfv), uy (nfv), p (nfv)] at 3*nfv*f.
/// Scalar trace: nfw per facet.
class SpaceLayout {
public:
  SpaceLayout(const Mesh& mesh, const SpaceOptions& opts);

  const Mesh& mesh() const { return *mesh_; }
  int k_flow() const { return k_; }
  int q_visc() const { return q_; }

  int nv() const { return nv_; }   // scalar P_k basis size per cell
  int np() const { return np_; }   // P_{k-1}
  int nw() const { return nw_; }   // P_q
  int nfv() const { return k_ + 1; } // flow trace basis size per facet (per component)
  int nfw() const { return q_ + 1; }

  int n_cells() const { return mesh_->n_cells(); }
  int n_facets() const { return mesh_->n_facets(); }

  int n_velocity_dofs() const { return 2 * nv_ * n_cells(); }
  int n_pressure_dofs() const { return np_ * n_cells(); }
  int n_viscosity_dofs() const { return nw_ * n_cells(); }
  int n_flow_trace_full() const { return 3 * nfv() * n_facets(); }
  int n_scalar_trace_full() const { return nfw() * n_facets(); }

  // solved (unconstrained) trace systems
  bool flow_dirichlet(int facet) const { return flow_dirichlet_[facet]; }
  bool scalar_dirichlet(int facet) const { return scalar_dirichlet_[facet]; }
  bool flow_neumann(int facet) const;
  bool scalar_neumann(int facet) const;
  /// base index of facet's u-hat block in the solved flow trace vector, -1 if constrained
  int flow_solved_u(int facet) const { return flow_solved_u_[facet]; }
  int flow_solved_p(int facet) const { return flow_solved_p_[facet]; }
  int scalar_solved(int facet) const { return scalar_solved_[facet]; }
  int n_flow_trace_solved() const { return n_flow_solved_; }
  int n_scalar_trace_solved() const { return n_scalar_solved_; }
  bool has_pressure_constraint() const { return pressure_constraint_; }
  int multiplier_index() const { return multiplier_index_; } // solved index of the mean-pressure multiplier

  const CellGeom& geom(int cell) const { return geom_[cell]; }

  // quadrature and reference basis tables shared by the assemblers
  const QuadratureRule& cell_rule() const { return cell_rule_; }
  const QuadratureRule& facet_rule() const { return facet_rule_; }
  // cell tables: val (nq x n), grad (2nq x n, ref coords), hess (3nq x n)
  const MatrixXd& cell_val(FieldKind f) const;
  const MatrixXd& cell_grad(FieldKind f) const;
  const MatrixXd& cell_hess(FieldKind f) const; // viscosity only
  // facet tables for interior bases, indexed [local facet][forward?1:0]
  const MatrixXd& facet_val(FieldKind f, int local, bool forward) const;
  const MatrixXd& facet_grad(FieldKind f, int local, bool forward) const;
  // trace basis values at the canonical facet quadrature parameters (nqf x nf)
  const MatrixXd& trace_val_flow() const { return trace_val_flow_; }
  const MatrixXd& trace_val_scalar() const { return trace_val_scalar_; }

  const Basis& cell_basis(FieldKind f) const;
  const Basis& trace_basis_flow() const { return *edge_basis_k_; }
  const Basis& trace_basis_scalar() const { return *edge_basis_q_; }

  /// physical coordinates of facet quadrature point q on the given cell side,
  /// for the canonical parameter s_q of the shared facet rule
  Vec2 facet_point(int cell, int local, bool forward, double s) const;
  Vec2 ref_coords(int cell, const Vec2& x) const;

  // L2 projections (exact for polynomial data up to the space degree)
  VectorXd project_velocity(const std::function<Vec2(const Vec2&)>& f) const;
  VectorXd project_scalar(FieldKind which, const std::function<double(const Vec2&)>& f) const;
  /// project g onto one facet's trace space (canonical parametrization)
  VectorXd project_facet(int facet, int nf, const std::function<double(const Vec2&)>& g) const;

  /// overwrite constrained entries of a full flow trace vector with the
  /// projection of g at time t
  void set_flow_dirichlet(VectorXd& trace_full,
                          const std::function<Vec2(const Vec2&, double)>& g, double t) const;
  void set_scalar_dirichlet(VectorXd& trace_full,
                            const std::function<double(const Vec2&, double)>& g, double t) const;

  /// DOF vector representing the constant function e_comp in V^h (or 1 in the
  /// scalar spaces when comp < 0); trace analogue for the flow trace space.
  VectorXd constant_velocity_dofs(int comp) const;
  VectorXd constant_flow_trace_dofs(int comp) const;

  // field evaluation at arbitrary points (output/diagnostics; not assembly-hot)
  Vec2 eval_velocity(const VectorXd& dofs, int cell, const Vec2& xi) const;
  double eval_scalar(FieldKind which, const VectorXd& dofs, int cell, const Vec2& xi) const;

  double l2_error_scalar(FieldKind which, const VectorXd& dofs,
                         const std::function<double(const Vec2&)>& exact, int quad_order) const;
  double l2_error_velocity(const VectorXd& dofs, const std::function<Vec2(const Vec2&)>& exact,
                           int quad_order) const;

private:
  const Mesh* mesh_;
  int k_, q_;
  int nv_, np_, nw_;
  QuadratureRule cell_rule_, facet_rule_;
  std::unique_ptr<Basis> tri_basis_k_, tri_basis_p_, tri_basis_q_;
  std::unique_ptr<Basis> edge_basis_k_, edge_basis_q_;
  MatrixXd cell_val_k_, cell_grad_k_, cell_val_p_, cell_val_q_, cell_grad_q_, cell_hess_q_;
  MatrixXd facet_val_k_[3][2], facet_grad_k_[3][2];
  MatrixXd facet_val_q_[3][2], facet_grad_q_[3][2];
  MatrixXd facet_val_p_[3][2];
  MatrixXd trace_val_flow_, trace_val_scalar_;
  std::vector<CellGeom> geom_;
  std::vector<bool> flow_dirichlet_, scalar_dirichlet_;
  std::vector<int> flow_solved_u_, flow_solved_p_, scalar_solved_;
  int n_flow_solved_ = 0, n_scalar_solved_ = 0;
  bool pressure_constraint_ = false;
  int multiplier_index_ = -1;

  MatrixXd eval_at_edge(const Basis& tri, int local, bool forward, int what) const;
};

/// (k+1)(k+2), the interior-penalty constant used with the h_e length scale
inline double penalty_constant(int k) { return double(k + 1) * (k + 2); }

/// lambda = 1 on inflow (u.n < 0), 0 otherwise; frozen in all tangents
inline double upwind_indicator(double u_dot_n) { return u_dot_n < 0.0 ? 1.0 : 0.0; }

} // namespace hdg
