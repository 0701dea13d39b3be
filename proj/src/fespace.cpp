#include "hdg/fespace.hpp"

#include <stdexcept>

namespace hdg {

namespace {

Eigen::Matrix<double, Eigen::Dynamic, 2> edge_to_tri_points(const Eigen::VectorXd& t, int local) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(t.size(), 2);
  for (int i = 0; i < t.size(); ++i) {
    switch (local) {
      case 0: pts.row(i) << t[i], 0.0; break;
      case 1: pts.row(i) << 1.0 - t[i], t[i]; break;
      default: pts.row(i) << 0.0, 1.0 - t[i]; break;
    }
  }
  return pts;
}

} // namespace

SpaceLayout::SpaceLayout(const Mesh& mesh, const SpaceOptions& opts) : mesh_(&mesh) {
  k_ = opts.k_flow;
  q_ = opts.q_visc >= 0 ? opts.q_visc : k_ - 1;
  if (k_ < 1) throw std::runtime_error("SpaceLayout: need velocity degree >= 1");
  if (q_ < 1) throw std::runtime_error("SpaceLayout: need viscosity degree >= 1");

  tri_basis_k_ = std::make_unique<Basis>(DomainKind::triangle, k_);
  tri_basis_p_ = std::make_unique<Basis>(DomainKind::triangle, k_ - 1);
  tri_basis_q_ = std::make_unique<Basis>(DomainKind::triangle, q_);
  edge_basis_k_ = std::make_unique<Basis>(DomainKind::edge, k_);
  edge_basis_q_ = std::make_unique<Basis>(DomainKind::edge, q_);
  nv_ = tri_basis_k_->size();
  np_ = tri_basis_p_->size();
  nw_ = tri_basis_q_->size();

  const int m = std::max(k_, q_);
  cell_rule_ = quadrature_rule(DomainKind::triangle,
                               opts.cell_quad_order > 0 ? opts.cell_quad_order : 2 * m + 2);
  facet_rule_ = quadrature_rule(DomainKind::edge,
                                opts.facet_quad_order > 0 ? opts.facet_quad_order : 2 * m + 1);

  cell_val_k_ = tri_basis_k_->values(cell_rule_.points);
  cell_grad_k_ = tri_basis_k_->gradients(cell_rule_.points);
  cell_val_p_ = tri_basis_p_->values(cell_rule_.points);
  cell_val_q_ = tri_basis_q_->values(cell_rule_.points);
  cell_grad_q_ = tri_basis_q_->gradients(cell_rule_.points);
  cell_hess_q_ = tri_basis_q_->hessians(cell_rule_.points);

  const Eigen::VectorXd s = facet_rule_.points.col(0);
  for (int local = 0; local < 3; ++local) {
    for (int fwd = 0; fwd < 2; ++fwd) {
      Eigen::VectorXd t = fwd ? s : (1.0 - s.array()).matrix();
      auto pts = edge_to_tri_points(t, local);
      facet_val_k_[local][fwd] = tri_basis_k_->values(pts);
      facet_grad_k_[local][fwd] = tri_basis_k_->gradients(pts);
      facet_val_q_[local][fwd] = tri_basis_q_->values(pts);
      facet_grad_q_[local][fwd] = tri_basis_q_->gradients(pts);
      facet_val_p_[local][fwd] = tri_basis_p_->values(pts);
    }
  }
  trace_val_flow_ = edge_basis_k_->values(facet_rule_.points);
  trace_val_scalar_ = edge_basis_q_->values(facet_rule_.points);

  geom_.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellGeom& g = geom_[c];
    const auto& cell = mesh.cells[c];
    const Vec2 v0 = mesh.nodes[cell[0]];
    g.x0 = v0;
    g.jac.col(0) = mesh.nodes[cell[1]] - v0;
    g.jac.col(1) = mesh.nodes[cell[2]] - v0;
    g.det_jac = g.jac.determinant();
    if (g.det_jac <= 0.0) throw std::runtime_error("SpaceLayout: cell with nonpositive area");
    g.jac_inv = g.jac.inverse();
    g.area = 0.5 * g.det_jac;
    g.h = mesh.element_length_scale(c);
    for (int l = 0; l < 3; ++l) {
      auto fg = mesh.facet_geometry(c, l);
      g.facet_normal[l] = fg.normal;
      g.facet_length[l] = fg.length;
    }
  }

  // boundary classification for each field
  const int nF = mesh.n_facets();
  flow_dirichlet_.assign(nF, false);
  scalar_dirichlet_.assign(nF, false);
  bool any_flow_neumann = false;
  for (int f = 0; f < nF; ++f) {
    const Facet& fc = mesh.facets[f];
    if (fc.interior() || fc.periodic) continue;
    const std::string& name = mesh.tag_names[fc.tag];
    BoundaryKind flow_kind = mesh.tags.at(name);
    BoundaryKind scalar_kind = flow_kind;
    if (auto it = opts.scalar_kind_override.find(name); it != opts.scalar_kind_override.end())
      scalar_kind = it->second;
    flow_dirichlet_[f] = flow_kind != BoundaryKind::neumann;
    scalar_dirichlet_[f] = scalar_kind != BoundaryKind::neumann;
    if (!flow_dirichlet_[f]) any_flow_neumann = true;
  }
  pressure_constraint_ =
      opts.pressure_mean_constraint >= 0 ? opts.pressure_mean_constraint != 0 : !any_flow_neumann;

  flow_solved_u_.assign(nF, -1);
  flow_solved_p_.assign(nF, -1);
  scalar_solved_.assign(nF, -1);
  int cnt = 0;
  for (int f = 0; f < nF; ++f) {
    if (!flow_dirichlet_[f]) {
      flow_solved_u_[f] = cnt;
      cnt += 2 * nfv();
    }
    flow_solved_p_[f] = cnt;
    cnt += nfv();
  }
  if (pressure_constraint_) multiplier_index_ = cnt++;
  n_flow_solved_ = cnt;
  cnt = 0;
  for (int f = 0; f < nF; ++f) {
    if (!scalar_dirichlet_[f]) {
      scalar_solved_[f] = cnt;
      cnt += nfw();
    }
  }
  n_scalar_solved_ = cnt;
}

bool SpaceLayout::flow_neumann(int facet) const {
  const Facet& fc = mesh_->facets[facet];
  return !fc.interior() && !fc.periodic && !flow_dirichlet_[facet];
}

bool SpaceLayout::scalar_neumann(int facet) const {
  const Facet& fc = mesh_->facets[facet];
  return !fc.interior() && !fc.periodic && !scalar_dirichlet_[facet];
}

const MatrixXd& SpaceLayout::cell_val(FieldKind f) const {
  switch (f) {
    case FieldKind::velocity: return cell_val_k_;
    case FieldKind::pressure: return cell_val_p_;
    default: return cell_val_q_;
  }
}

const MatrixXd& SpaceLayout::cell_grad(FieldKind f) const {
  if (f == FieldKind::velocity) return cell_grad_k_;
  if (f == FieldKind::viscosity) return cell_grad_q_;
  throw std::runtime_error("cell_grad: pressure gradients are not tabulated");
}

const MatrixXd& SpaceLayout::cell_hess(FieldKind f) const {
  if (f != FieldKind::viscosity) throw std::runtime_error("cell_hess: viscosity basis only");
  return cell_hess_q_;
}

const MatrixXd& SpaceLayout::facet_val(FieldKind f, int local, bool forward) const {
  switch (f) {
    case FieldKind::velocity: return facet_val_k_[local][forward];
    case FieldKind::pressure: return facet_val_p_[local][forward];
    default: return facet_val_q_[local][forward];
  }
}

const MatrixXd& SpaceLayout::facet_grad(FieldKind f, int local, bool forward) const {
  if (f == FieldKind::velocity) return facet_grad_k_[local][forward];
  if (f == FieldKind::viscosity) return facet_grad_q_[local][forward];
  throw std::runtime_error("facet_grad: pressure gradients are not tabulated");
}

const Basis& SpaceLayout::cell_basis(FieldKind f) const {
  switch (f) {
    case FieldKind::velocity: return *tri_basis_k_;
    case FieldKind::pressure: return *tri_basis_p_;
    default: return *tri_basis_q_;
  }
}

Vec2 SpaceLayout::facet_point(int cell, int local, bool forward, double s) const {
  auto fg = mesh_->facet_geometry(cell, local);
  const Vec2 start = forward ? fg.a : fg.b;
  const Vec2 end = forward ? fg.b : fg.a;
  return start + s * (end - start);
}

Vec2 SpaceLayout::ref_coords(int cell, const Vec2& x) const {
  const CellGeom& g = geom_[cell];
  return g.jac_inv * (x - g.x0);
}

VectorXd SpaceLayout::project_velocity(const std::function<Vec2(const Vec2&)>& f) const {
  VectorXd out = VectorXd::Zero(n_velocity_dofs());
  const int nq = cell_rule_.size();
  for (int c = 0; c < n_cells(); ++c) {
    const CellGeom& g = geom_[c];
    for (int qp = 0; qp < nq; ++qp) {
      const Vec2 xi = cell_rule_.points.row(qp).transpose();
      const Vec2 x = g.x0 + g.jac * xi;
      const Vec2 v = f(x);
      const double w = cell_rule_.weights[qp];
      // reference mass matrix is the identity: coef_i = int_ref f(x(xi)) phi_i
      for (int i = 0; i < nv_; ++i) {
        const double phi = cell_val_k_(qp, i);
        out[c * 2 * nv_ + i] += w * v.x() * phi;
        out[c * 2 * nv_ + nv_ + i] += w * v.y() * phi;
      }
    }
  }
  return out;
}

VectorXd SpaceLayout::project_scalar(FieldKind which,
                                     const std::function<double(const Vec2&)>& f) const {
  const int n = which == FieldKind::pressure ? np_ : (which == FieldKind::velocity ? nv_ : nw_);
  const MatrixXd& val = cell_val(which);
  VectorXd out = VectorXd::Zero(n * n_cells());
  const int nq = cell_rule_.size();
  for (int c = 0; c < n_cells(); ++c) {
    const CellGeom& g = geom_[c];
    for (int qp = 0; qp < nq; ++qp) {
      const Vec2 xi = cell_rule_.points.row(qp).transpose();
      const double fv = f(g.x0 + g.jac * xi);
      const double w = cell_rule_.weights[qp];
      for (int i = 0; i < n; ++i) out[c * n + i] += w * fv * val(qp, i);
    }
  }
  return out;
}

VectorXd SpaceLayout::project_facet(int facet, int nf,
                                    const std::function<double(const Vec2&)>& g) const {
  const Facet& fc = mesh_->facets[facet];
  const MatrixXd& psi = nf == nfv() ? trace_val_flow_ : trace_val_scalar_;
  VectorXd out = VectorXd::Zero(nf);
  for (int qp = 0; qp < facet_rule_.size(); ++qp) {
    const double s = facet_rule_.points(qp, 0);
    const Vec2 x = facet_point(fc.cell[0], fc.local[0], fc.forward[0], s);
    const double w = facet_rule_.weights[qp];
    for (int i = 0; i < nf; ++i) out[i] += w * g(x) * psi(qp, i);
  }
  return out;
}

void SpaceLayout::set_flow_dirichlet(VectorXd& trace_full,
                                     const std::function<Vec2(const Vec2&, double)>& g,
                                     double t) const {
  for (int f = 0; f < n_facets(); ++f) {
    if (!flow_dirichlet_[f]) continue;
    auto gx = project_facet(f, nfv(), [&](const Vec2& x) { return g(x, t).x(); });
    auto gy = project_facet(f, nfv(), [&](const Vec2& x) { return g(x, t).y(); });
    trace_full.segment(3 * nfv() * f, nfv()) = gx;
    trace_full.segment(3 * nfv() * f + nfv(), nfv()) = gy;
  }
}

void SpaceLayout::set_scalar_dirichlet(VectorXd& trace_full,
                                       const std::function<double(const Vec2&, double)>& g,
                                       double t) const {
  for (int f = 0; f < n_facets(); ++f) {
    if (!scalar_dirichlet_[f]) continue;
    trace_full.segment(nfw() * f, nfw()) =
        project_facet(f, nfw(), [&](const Vec2& x) { return g(x, t); });
  }
}

VectorXd SpaceLayout::constant_velocity_dofs(int comp) const {
  Eigen::Matrix<double, Eigen::Dynamic, 2> pt(1, 2);
  pt << 1.0 / 3.0, 1.0 / 3.0;
  const double phi0 = tri_basis_k_->values(pt)(0, 0);
  VectorXd out = VectorXd::Zero(n_velocity_dofs());
  for (int c = 0; c < n_cells(); ++c) out[c * 2 * nv_ + comp * nv_] = 1.0 / phi0;
  return out;
}

VectorXd SpaceLayout::constant_flow_trace_dofs(int comp) const {
  Eigen::Matrix<double, Eigen::Dynamic, 2> pt(1, 2);
  pt << 0.5, 0.0;
  const double psi0 = edge_basis_k_->values(pt)(0, 0);
  VectorXd out = VectorXd::Zero(n_flow_trace_full());
  for (int f = 0; f < n_facets(); ++f) out[3 * nfv() * f + comp * nfv()] = 1.0 / psi0;
  return out;
}

Vec2 SpaceLayout::eval_velocity(const VectorXd& dofs, int cell, const Vec2& xi) const {
  Eigen::Matrix<double, Eigen::Dynamic, 2> pt(1, 2);
  pt << xi.x(), xi.y();
  const Eigen::RowVectorXd phi = tri_basis_k_->values(pt).row(0);
  Vec2 u;
  u.x() = phi * dofs.segment(cell * 2 * nv_, nv_);
  u.y() = phi * dofs.segment(cell * 2 * nv_ + nv_, nv_);
  return u;
}

double SpaceLayout::eval_scalar(FieldKind which, const VectorXd& dofs, int cell,
                                const Vec2& xi) const {
  const int n = which == FieldKind::pressure ? np_ : (which == FieldKind::velocity ? nv_ : nw_);
  Eigen::Matrix<double, Eigen::Dynamic, 2> pt(1, 2);
  pt << xi.x(), xi.y();
  return cell_basis(which).values(pt).row(0) * dofs.segment(cell * n, n);
}

double SpaceLayout::l2_error_scalar(FieldKind which, const VectorXd& dofs,
                                    const std::function<double(const Vec2&)>& exact,
                                    int quad_order) const {
  const int n = which == FieldKind::pressure ? np_ : (which == FieldKind::velocity ? nv_ : nw_);
  auto rule = quadrature_rule(DomainKind::triangle, quad_order);
  const MatrixXd val = cell_basis(which).values(rule.points);
  double err2 = 0.0;
  for (int c = 0; c < n_cells(); ++c) {
    const CellGeom& g = geom_[c];
    for (int qp = 0; qp < rule.size(); ++qp) {
      const Vec2 xi = rule.points.row(qp).transpose();
      const double uh = val.row(qp) * dofs.segment(c * n, n);
      const double d = uh - exact(g.x0 + g.jac * xi);
      err2 += rule.weights[qp] * g.det_jac * d * d;
    }
  }
  return std::sqrt(err2);
}

double SpaceLayout::l2_error_velocity(const VectorXd& dofs,
                                      const std::function<Vec2(const Vec2&)>& exact,
                                      int quad_order) const {
  auto rule = quadrature_rule(DomainKind::triangle, quad_order);
  const MatrixXd val = tri_basis_k_->values(rule.points);
  double err2 = 0.0;
  for (int c = 0; c < n_cells(); ++c) {
    const CellGeom& g = geom_[c];
    for (int qp = 0; qp < rule.size(); ++qp) {
      const Vec2 xi = rule.points.row(qp).transpose();
      Vec2 uh;
      uh.x() = val.row(qp) * dofs.segment(c * 2 * nv_, nv_);
      uh.y() = val.row(qp) * dofs.segment(c * 2 * nv_ + nv_, nv_);
      err2 += rule.weights[qp] * g.det_jac * (uh - exact(g.x0 + g.jac * xi)).squaredNorm();
    }
  }
  return std::sqrt(err2);
}

} // namespace hdg
