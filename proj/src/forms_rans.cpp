#include "hdg/forms_rans.hpp"

#include <stdexcept>

namespace hdg {

namespace {

// physical gradients of all basis functions at one quadrature point:
// column i = J^{-T} * (d/dxi, d/deta) of basis i
MatrixXd phys_grad(const MatrixXd& gref, int qp, const Mat2& jac_inv) {
  const int n = static_cast<int>(gref.cols());
  MatrixXd g(2, n);
  for (int i = 0; i < n; ++i)
    g.col(i) = jac_inv.transpose() * Vec2(gref(2 * qp, i), gref(2 * qp + 1, i));
  return g;
}

int side_of(const Facet& fc, int cell, int local) {
  for (int s = 0; s < 2; ++s)
    if (fc.cell[s] == cell && fc.local[s] == local) return s;
  throw std::runtime_error("facet incidence table is inconsistent");
}

} // namespace

EddyField EddyField::zero(const SpaceLayout& sp) {
  EddyField e;
  e.cell = VectorXd::Zero(static_cast<Eigen::Index>(sp.n_cells()) * sp.cell_rule().size());
  e.facet = VectorXd::Zero(static_cast<Eigen::Index>(sp.n_cells()) * 3 * sp.facet_rule().size());
  return e;
}

EddyField EddyField::from_state(const SpaceLayout& sp, const VectorXd& phi, double nu,
                                const SAConstants& c) {
  EddyField e = zero(sp);
  const int nw = sp.nw(), nq = sp.cell_rule().size(), nqf = sp.facet_rule().size();
  const MatrixXd& Vc = sp.cell_val(FieldKind::viscosity);
  const Mesh& mesh = sp.mesh();
  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const auto lphi = phi.segment(cell * nw, nw);
    for (int qp = 0; qp < nq; ++qp)
      e.cell[cell * nq + qp] = sa_eddy_viscosity(Jet1(Vc.row(qp) * lphi), nu, c).v;
    for (int l = 0; l < 3; ++l) {
      const Facet& fc = mesh.facets[mesh.cell_facets[cell][l]];
      const bool fwd = fc.forward[side_of(fc, cell, l)];
      const MatrixXd& Vf = sp.facet_val(FieldKind::viscosity, l, fwd);
      for (int qp = 0; qp < nqf; ++qp)
        e.facet[(cell * 3 + l) * nqf + qp] =
            sa_eddy_viscosity(Jet1(Vf.row(qp) * lphi), nu, c).v;
    }
  }
  return e;
}

void assemble_flow(const SpaceLayout& sp, const FlowOptions& opt, const EddyField& nu_t,
                   const VectorXd& udot, const VectorXd& u, const VectorXd& p,
                   const VectorXd& trace_full, double xi, BlockSystem& bs) {
  const Mesh& mesh = sp.mesh();
  const int nv = sp.nv(), np = sp.np(), nfv = sp.nfv();
  const int ni = 2 * nv + np;
  const auto& cr = sp.cell_rule();
  const auto& fr = sp.facet_rule();
  const int nq = cr.size(), nqf = fr.size();
  const MatrixXd& Vc = sp.cell_val(FieldKind::velocity);
  const MatrixXd& Gc = sp.cell_grad(FieldKind::velocity);
  const MatrixXd& Pc = sp.cell_val(FieldKind::pressure);
  const MatrixXd& Tv = sp.trace_val_flow();
  const double cpen = penalty_constant(sp.k_flow());
  const double irho = 1.0 / opt.rho;
  const bool mult = sp.has_pressure_constraint();
  // the multiplier couples densely after condensation; any pressure trace
  // serves as the deflation pivot of the bordered solve
  if (mult) bs.set_dense_border(sp.flow_solved_p(0));

  if (!udot.allFinite() || !u.allFinite() || !p.allFinite() || !trace_full.allFinite())
    throw std::runtime_error("assemble_flow: non-finite state");

  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const CellGeom& g = sp.geom(cell);
    const auto Ux = u.segment(cell * 2 * nv, nv), Uy = u.segment(cell * 2 * nv + nv, nv);
    const auto Dx = udot.segment(cell * 2 * nv, nv), Dy = udot.segment(cell * 2 * nv + nv, nv);
    const auto Pl = p.segment(cell * np, np);

    std::vector<int> cols;
    int lu[3], lp[3];
    for (int l = 0; l < 3; ++l) {
      const int f = mesh.cell_facets[cell][l];
      const int ub = sp.flow_solved_u(f);
      lu[l] = ub >= 0 ? static_cast<int>(cols.size()) : -1;
      if (ub >= 0)
        for (int j = 0; j < 2 * nfv; ++j) cols.push_back(ub + j);
      lp[l] = static_cast<int>(cols.size());
      for (int j = 0; j < nfv; ++j) cols.push_back(sp.flow_solved_p(f) + j);
    }
    int lxi = -1;
    if (mult) {
      lxi = static_cast<int>(cols.size());
      cols.push_back(sp.multiplier_index());
    }
    const int nc = static_cast<int>(cols.size());

    MatrixXd A = MatrixXd::Zero(ni, ni), C = MatrixXd::Zero(ni, nc), B = MatrixXd::Zero(nc, ni);
    VectorXd R = VectorXd::Zero(ni);

    // volume terms
    for (int qp = 0; qp < nq; ++qp) {
      const double dx = cr.weights[qp] * g.det_jac;
      const auto v = Vc.row(qp);
      const MatrixXd Gp = phys_grad(Gc, qp, g.jac_inv);
      const Vec2 uval(v * Ux, v * Uy), udval(v * Dx, v * Dy);
      Mat2 gu; // gu(a,b) = d u_a / d x_b
      gu.row(0) = (Gp * Ux).transpose();
      gu.row(1) = (Gp * Uy).transpose();
      const Mat2 two_sym = gu + gu.transpose();
      const double divu = gu.trace();
      const double pval = Pc.row(qp) * Pl;
      const double visc = opt.nu + nu_t.cell[cell * nq + qp];
      const Vec2 x = g.x0 + g.jac * Vec2(cr.points(qp, 0), cr.points(qp, 1));
      const Vec2 f = opt.body_force ? opt.body_force(x, opt.time) : Vec2(0, 0);

      for (int cc = 0; cc < 2; ++cc) {
        for (int i = 0; i < nv; ++i) {
          const int row = cc * nv + i;
          double r = udval[cc] * v[i];
          r += -pval * irho * Gp(cc, i);
          r += visc * (two_sym * Gp.col(i))[cc];
          r += -f[cc] * v[i];
          if (opt.advection) r += -uval[cc] * (uval.dot(Gp.col(i)));
          R[row] += dx * r;

          for (int c2 = 0; c2 < 2; ++c2)
            for (int j = 0; j < nv; ++j) {
              const int col = c2 * nv + j;
              double av = 0.0;
              if (cc == c2) av += opt.w_rate * v[i] * v[j];
              double dv = visc * ((cc == c2 ? Gp.col(j).dot(Gp.col(i)) : 0.0) +
                                  Gp(cc, j) * Gp(c2, i));
              if (opt.advection)
                dv += -((cc == c2 ? v[j] * uval.dot(Gp.col(i)) : 0.0) +
                        uval[cc] * Gp(c2, i) * v[j]);
              A(row, col) += dx * (av + opt.w_val * dv);
            }
          for (int j = 0; j < np; ++j)
            A(row, 2 * nv + j) += -dx * irho * Pc(qp, j) * Gp(cc, i);
        }
      }
      for (int i = 0; i < np; ++i) {
        const int row = 2 * nv + i;
        R[row] += dx * (irho * divu * Pc(qp, i) + (mult ? xi * Pc(qp, i) : 0.0));
        for (int c2 = 0; c2 < 2; ++c2)
          for (int j = 0; j < nv; ++j)
            A(row, c2 * nv + j) += opt.w_val * dx * irho * Gp(c2, j) * Pc(qp, i);
        if (mult) C(row, lxi) += dx * Pc(qp, i);
      }
      if (mult) {
        bs.add_trace_rhs(sp.multiplier_index(), dx * pval);
        for (int j = 0; j < np; ++j) B(lxi, 2 * nv + j) += dx * Pc(qp, j);
      }
    }

    // facet terms
    for (int l = 0; l < 3; ++l) {
      const int f = mesh.cell_facets[cell][l];
      const Facet& fc = mesh.facets[f];
      const bool fwd = fc.forward[side_of(fc, cell, l)];
      const Vec2 n = g.facet_normal[l];
      const double len = g.facet_length[l];
      const double pen = 2.0 * cpen / g.h;
      const MatrixXd& Vf = sp.facet_val(FieldKind::velocity, l, fwd);
      const MatrixXd& Gf = sp.facet_grad(FieldKind::velocity, l, fwd);
      const bool physical_bdy = !fc.interior() && !fc.periodic;
      const bool neumann = sp.flow_neumann(f);
      const bool solved_u = sp.flow_solved_u(f) >= 0;
      const auto Hx = trace_full.segment(3 * nfv * f, nfv);
      const auto Hy = trace_full.segment(3 * nfv * f + nfv, nfv);
      const auto Hp = trace_full.segment(3 * nfv * f + 2 * nfv, nfv);
      const int gu_base = sp.flow_solved_u(f), gp_base = sp.flow_solved_p(f);

      for (int qp = 0; qp < nqf; ++qp) {
        const double ds = fr.weights[qp] * len;
        const auto v = Vf.row(qp);
        const auto tv = Tv.row(qp);
        const MatrixXd Gp = phys_grad(Gf, qp, g.jac_inv);
        const Vec2 uval(v * Ux, v * Uy);
        Mat2 gu;
        gu.row(0) = (Gp * Ux).transpose();
        gu.row(1) = (Gp * Uy).transpose();
        const Mat2 two_sym = gu + gu.transpose();
        const Vec2 uhat(tv * Hx, tv * Hy);
        const double phat = tv * Hp;
        const Vec2 du = uhat - uval;
        const double un = uval.dot(n);
        const double lam = opt.advection ? upwind_indicator(un) : 0.0;
        const double visc = opt.nu + nu_t.facet[(cell * 3 + l) * nqf + qp];
        const Vec2 tsn = two_sym * n;

        // momentum rows
        for (int cc = 0; cc < 2; ++cc) {
          for (int i = 0; i < nv; ++i) {
            const int row = cc * nv + i;
            double r = phat * irho * n[cc] * v[i];
            r += -visc * tsn[cc] * v[i];
            r += -pen * visc * du[cc] * v[i];
            r += visc * (du[cc] * n.dot(Gp.col(i)) + du.dot(Gp.col(i)) * n[cc]);
            if (opt.advection) r += un * uval[cc] * v[i] + lam * un * du[cc] * v[i];
            R[row] += ds * r;

            // d/du
            for (int c2 = 0; c2 < 2; ++c2)
              for (int j = 0; j < nv; ++j) {
                const double d = cc == c2 ? 1.0 : 0.0;
                double dv = -visc * (d * Gp.col(j).dot(n) + Gp(cc, j) * n[c2]) * v[i];
                dv += pen * visc * d * v[j] * v[i];
                dv += -visc * (d * v[j] * n.dot(Gp.col(i)) + Gp(c2, i) * v[j] * n[cc]);
                if (opt.advection) {
                  dv += (d * v[j] * un + uval[cc] * n[c2] * v[j]) * v[i];
                  dv += lam * (n[c2] * v[j] * du[cc] - d * un * v[j]) * v[i];
                }
                A(row, c2 * nv + j) += opt.w_val * ds * dv;
              }
            // d/duhat
            if (solved_u)
              for (int c2 = 0; c2 < 2; ++c2)
                for (int m = 0; m < nfv; ++m) {
                  const double d = cc == c2 ? 1.0 : 0.0;
                  double dv = -pen * visc * d * tv[m] * v[i];
                  dv += visc * (d * tv[m] * n.dot(Gp.col(i)) + Gp(c2, i) * tv[m] * n[cc]);
                  if (opt.advection) dv += lam * un * d * tv[m] * v[i];
                  C(row, lu[l] + c2 * nfv + m) += ds * dv;
                }
            // d/dphat
            for (int m = 0; m < nfv; ++m)
              C(row, lp[l] + m) += ds * irho * n[cc] * tv[m] * v[i];
          }
        }

        // continuity conservativity rows (pressure trace), always solved
        for (int j = 0; j < nfv; ++j) {
          double r = irho * un * tv[j];
          if (physical_bdy) r += -irho * uhat.dot(n) * tv[j];
          bs.add_trace_rhs(gp_base + j, ds * r);
          for (int c2 = 0; c2 < 2; ++c2) {
            for (int j2 = 0; j2 < nv; ++j2)
              B(lp[l] + j, c2 * nv + j2) += opt.w_val * ds * irho * n[c2] * Vf(qp, j2) * tv[j];
            if (physical_bdy && solved_u)
              for (int m = 0; m < nfv; ++m)
                bs.add_trace(gp_base + j, gu_base + c2 * nfv + m, -ds * irho * n[c2] * tv[m] * tv[j]);
          }
        }

        // momentum conservativity rows (velocity trace), where solved
        if (solved_u) {
          const double uhn = uhat.dot(n);
          const double lamh = opt.advection ? upwind_indicator(uhn) : 0.0;
          const Vec2 h = (neumann && opt.traction)
                             ? opt.traction(sp.facet_point(cell, l, fwd, fr.points(qp, 0)), opt.time)
                             : Vec2(0, 0);
          for (int cc = 0; cc < 2; ++cc)
            for (int j = 0; j < nfv; ++j) {
              const int grow = gu_base + cc * nfv + j;
              double r = -phat * irho * n[cc] * tv[j];
              r += visc * tsn[cc] * tv[j];
              r += pen * visc * du[cc] * tv[j];
              if (opt.advection) r += -un * uval[cc] * tv[j] - lam * un * du[cc] * tv[j];
              if (neumann) {
                if (opt.advection) r += (1.0 - lamh) * uhn * uhat[cc] * tv[j];
                r += h[cc] * tv[j];
              }
              bs.add_trace_rhs(grow, ds * r);

              const int lrow = lu[l] + cc * nfv + j;
              for (int c2 = 0; c2 < 2; ++c2)
                for (int j2 = 0; j2 < nv; ++j2) {
                  const double d = cc == c2 ? 1.0 : 0.0;
                  double dv = visc * (d * Gp.col(j2).dot(n) + Gp(cc, j2) * n[c2]) * tv[j];
                  dv += -pen * visc * d * Vf(qp, j2) * tv[j];
                  if (opt.advection) {
                    dv += -(n[c2] * Vf(qp, j2) * uval[cc] + un * d * Vf(qp, j2)) * tv[j];
                    dv += -lam * (n[c2] * Vf(qp, j2) * du[cc] - un * d * Vf(qp, j2)) * tv[j];
                  }
                  B(lrow, c2 * nv + j2) += opt.w_val * ds * dv;
                }
              for (int c2 = 0; c2 < 2; ++c2)
                for (int m = 0; m < nfv; ++m) {
                  const double d = cc == c2 ? 1.0 : 0.0;
                  double dv = pen * visc * d * tv[m] * tv[j];
                  if (opt.advection) dv += -lam * un * d * tv[m] * tv[j];
                  if (neumann && opt.advection)
                    dv += (1.0 - lamh) * (n[c2] * tv[m] * uhat[cc] + uhn * d * tv[m]) * tv[j];
                  bs.add_trace(grow, gu_base + c2 * nfv + m, ds * dv);
                }
              for (int m = 0; m < nfv; ++m)
                bs.add_trace(grow, gp_base + m, -ds * irho * n[cc] * tv[m] * tv[j]);
            }
        }
      }
    }

    bs.set_cell(cell, std::move(A), std::move(C), std::move(B), std::move(R), std::move(cols));
  }
}

std::pair<double, double> check_divergence(const SpaceLayout& sp, const VectorXd& u) {
  const Mesh& mesh = sp.mesh();
  const int nv = sp.nv(), nq = sp.cell_rule().size(), nqf = sp.facet_rule().size();
  const MatrixXd& Gc = sp.cell_grad(FieldKind::velocity);
  double max_div = 0.0, max_jump = 0.0;
  Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(sp.n_facets() * nqf, 2);
  std::vector<std::array<int, 2>> seen(sp.n_facets(), {0, 0});
  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const CellGeom& g = sp.geom(cell);
    const auto Ux = u.segment(cell * 2 * nv, nv), Uy = u.segment(cell * 2 * nv + nv, nv);
    for (int qp = 0; qp < nq; ++qp) {
      const MatrixXd Gp = phys_grad(Gc, qp, g.jac_inv);
      max_div = std::max(max_div, std::abs((Gp * Ux)[0] + (Gp * Uy)[1]));
    }
    for (int l = 0; l < 3; ++l) {
      const int f = mesh.cell_facets[cell][l];
      const Facet& fc = mesh.facets[f];
      const int side = side_of(fc, cell, l);
      const bool fwd = fc.forward[side];
      const MatrixXd& Vf = sp.facet_val(FieldKind::velocity, l, fwd);
      for (int qp = 0; qp < nqf; ++qp) {
        const Vec2 uval(Vf.row(qp) * Ux, Vf.row(qp) * Uy);
        flux(f * nqf + qp, side) = uval.dot(g.facet_normal[l]);
      }
      seen[f][side] = 1;
    }
  }
  for (int f = 0; f < sp.n_facets(); ++f) {
    if (!(seen[f][0] && seen[f][1])) continue; // boundary facet: no jump
    for (int qp = 0; qp < nqf; ++qp)
      max_jump = std::max(max_jump, std::abs(flux(f * nqf + qp, 0) + flux(f * nqf + qp, 1)));
  }
  return {max_div, max_jump};
}

double kinetic_energy(const SpaceLayout& sp, const VectorXd& u) {
  const int nv = sp.nv(), nq = sp.cell_rule().size();
  const MatrixXd& Vc = sp.cell_val(FieldKind::velocity);
  double e = 0.0;
  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const CellGeom& g = sp.geom(cell);
    const auto Ux = u.segment(cell * 2 * nv, nv), Uy = u.segment(cell * 2 * nv + nv, nv);
    for (int qp = 0; qp < nq; ++qp) {
      const Vec2 uval(Vc.row(qp) * Ux, Vc.row(qp) * Uy);
      e += 0.5 * sp.cell_rule().weights[qp] * g.det_jac * uval.squaredNorm();
    }
  }
  return e;
}

Vec2 momentum_integral(const SpaceLayout& sp, const VectorXd& u) {
  const int nv = sp.nv(), nq = sp.cell_rule().size();
  const MatrixXd& Vc = sp.cell_val(FieldKind::velocity);
  Vec2 m(0, 0);
  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const CellGeom& g = sp.geom(cell);
    const auto Ux = u.segment(cell * 2 * nv, nv), Uy = u.segment(cell * 2 * nv + nv, nv);
    for (int qp = 0; qp < nq; ++qp) {
      m.x() += sp.cell_rule().weights[qp] * g.det_jac * Vc.row(qp).dot(Ux);
      m.y() += sp.cell_rule().weights[qp] * g.det_jac * Vc.row(qp).dot(Uy);
    }
  }
  return m;
}

} // namespace hdg
