#include "hdg/forms_scalar.hpp"

#include <stdexcept>

namespace hdg {

namespace {

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

AdvectionField AdvectionField::from_flow(const SpaceLayout& sp, const VectorXd& u,
                                         const VectorXd& flow_trace_full) {
  const Mesh& mesh = sp.mesh();
  const int nv = sp.nv(), nfv = sp.nfv();
  const int nq = sp.cell_rule().size(), nqf = sp.facet_rule().size();
  const MatrixXd& Vc = sp.cell_val(FieldKind::velocity);
  const MatrixXd& Gc = sp.cell_grad(FieldKind::velocity);
  const MatrixXd& Tv = sp.trace_val_flow();
  AdvectionField a;
  a.cell.resize(sp.n_cells() * nq, 2);
  a.vorticity.resize(sp.n_cells() * nq);
  a.facet_int.resize(sp.n_cells() * 3 * nqf, 2);
  a.facet_trace.resize(sp.n_cells() * 3 * nqf, 2);
  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const CellGeom& g = sp.geom(cell);
    const auto Ux = u.segment(cell * 2 * nv, nv), Uy = u.segment(cell * 2 * nv + nv, nv);
    for (int qp = 0; qp < nq; ++qp) {
      a.cell(cell * nq + qp, 0) = Vc.row(qp) * Ux;
      a.cell(cell * nq + qp, 1) = Vc.row(qp) * Uy;
      const MatrixXd Gp = phys_grad(Gc, qp, g.jac_inv);
      // |du_y/dx - du_x/dy|
      a.vorticity[cell * nq + qp] = std::abs((Gp.row(0) * Uy)[0] - (Gp.row(1) * Ux)[0]);
    }
    for (int l = 0; l < 3; ++l) {
      const int f = mesh.cell_facets[cell][l];
      const Facet& fc = mesh.facets[f];
      const bool fwd = fc.forward[side_of(fc, cell, l)];
      const MatrixXd& Vf = sp.facet_val(FieldKind::velocity, l, fwd);
      const auto Hx = flow_trace_full.segment(3 * nfv * f, nfv);
      const auto Hy = flow_trace_full.segment(3 * nfv * f + nfv, nfv);
      for (int qp = 0; qp < nqf; ++qp) {
        const int r = (cell * 3 + l) * nqf + qp;
        a.facet_int(r, 0) = Vf.row(qp) * Ux;
        a.facet_int(r, 1) = Vf.row(qp) * Uy;
        a.facet_trace(r, 0) = Tv.row(qp) * Hx;
        a.facet_trace(r, 1) = Tv.row(qp) * Hy;
      }
    }
  }
  return a;
}

AdvectionField AdvectionField::from_function(const SpaceLayout& sp,
                                             const std::function<Vec2(const Vec2&, double)>& f,
                                             double t) {
  const Mesh& mesh = sp.mesh();
  const int nq = sp.cell_rule().size(), nqf = sp.facet_rule().size();
  AdvectionField a;
  a.cell.resize(sp.n_cells() * nq, 2);
  a.vorticity = VectorXd::Zero(sp.n_cells() * nq);
  a.facet_int.resize(sp.n_cells() * 3 * nqf, 2);
  a.facet_trace.resize(sp.n_cells() * 3 * nqf, 2);
  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const CellGeom& g = sp.geom(cell);
    for (int qp = 0; qp < nq; ++qp) {
      const Vec2 x = g.x0 + g.jac * Vec2(sp.cell_rule().points(qp, 0), sp.cell_rule().points(qp, 1));
      a.cell.row(cell * nq + qp) = f(x, t).transpose();
    }
    for (int l = 0; l < 3; ++l) {
      const int fct = mesh.cell_facets[cell][l];
      const Facet& fc = mesh.facets[fct];
      const bool fwd = fc.forward[side_of(fc, cell, l)];
      for (int qp = 0; qp < nqf; ++qp) {
        const Vec2 x = sp.facet_point(cell, l, fwd, sp.facet_rule().points(qp, 0));
        const int r = (cell * 3 + l) * nqf + qp;
        a.facet_int.row(r) = f(x, t).transpose();
        a.facet_trace.row(r) = f(x, t).transpose();
      }
    }
  }
  return a;
}

double dc_diffusivity(double y_ref, double z_residual, const Vec2& grad_phi, double h_dc,
                      double beta) {
  const double zy = std::abs(z_residual / y_ref);
  if (beta == 2.0) return zy * 0.25 * h_dc * h_dc;
  const double eps = 1e-10 * y_ref / h_dc;
  const double g2 = (grad_phi / y_ref).squaredNorm() + eps * eps;
  return zy * std::pow(g2, 0.5 * beta - 1.0) * std::pow(0.5 * h_dc, beta);
}

ScalarDiagnostics assemble_scalar(const SpaceLayout& sp, const ScalarOptions& opt,
                                  const AdvectionField& adv, const VectorXd& phidot,
                                  const VectorXd& phi, const VectorXd& trace_full,
                                  BlockSystem& bs) {
  if (!opt.kappa) throw std::runtime_error("assemble_scalar: diffusivity not set");
  if (opt.sa_source && !opt.wall_distance)
    throw std::runtime_error("assemble_scalar: turbulence source requires a wall distance");
  if (!phidot.allFinite() || !phi.allFinite() || !trace_full.allFinite())
    throw std::runtime_error("assemble_scalar: non-finite state");

  ScalarDiagnostics diag;
  const Mesh& mesh = sp.mesh();
  const int nw = sp.nw(), nfw = sp.nfw();
  const auto& cr = sp.cell_rule();
  const auto& fr = sp.facet_rule();
  const int nq = cr.size(), nqf = fr.size();
  const MatrixXd& Vc = sp.cell_val(FieldKind::viscosity);
  const MatrixXd& Gc = sp.cell_grad(FieldKind::viscosity);
  const MatrixXd& Hc = sp.cell_hess(FieldKind::viscosity);
  const MatrixXd& Tw = sp.trace_val_scalar();
  // use the flow-degree penalty constant for every equation: the scalar-degree
  // bound is sufficient for stability but leaves larger facet jumps, which feed
  // back into the mean-flow accuracy through the eddy viscosity
  const double cpen = penalty_constant(sp.k_flow());

  for (int cell = 0; cell < sp.n_cells(); ++cell) {
    const CellGeom& g = sp.geom(cell);
    const auto Pl = phi.segment(cell * nw, nw);
    const auto Pd = phidot.segment(cell * nw, nw);

    std::vector<int> cols;
    int lt[3];
    for (int l = 0; l < 3; ++l) {
      const int f = mesh.cell_facets[cell][l];
      const int tb = sp.scalar_solved(f);
      lt[l] = tb >= 0 ? static_cast<int>(cols.size()) : -1;
      if (tb >= 0)
        for (int j = 0; j < nfw; ++j) cols.push_back(tb + j);
    }
    const int nc = static_cast<int>(cols.size());
    MatrixXd A = MatrixXd::Zero(nw, nw), C = MatrixXd::Zero(nw, nc), B = MatrixXd::Zero(nc, nw);
    VectorXd R = VectorXd::Zero(nw);

    for (int qp = 0; qp < nq; ++qp) {
      const double dx = cr.weights[qp] * g.det_jac;
      const auto w = Vc.row(qp);
      const MatrixXd Gp = phys_grad(Gc, qp, g.jac_inv);
      const double pv = w * Pl, pd = w * Pd;
      const Vec2 grad = Gp * Pl;
      const Vec2 uvol = adv.cell.row(cell * nq + qp).transpose();
      const Vec2 x = g.x0 + g.jac * Vec2(cr.points(qp, 0), cr.points(qp, 1));
      const double fval = opt.forcing ? opt.forcing(x, opt.time) : 0.0;
      const Jet1 kap = opt.kappa(Jet1::var(pv));

      double kdc = 0.0;
      if (opt.dc) {
        // pointwise strong residual; laplacian from the reference Hessians
        double lap = 0.0;
        for (int i = 0; i < nw; ++i) {
          Mat2 href;
          href << Hc(3 * qp, i), Hc(3 * qp + 1, i), Hc(3 * qp + 1, i), Hc(3 * qp + 2, i);
          lap += Pl[i] * (g.jac_inv.transpose() * href * g.jac_inv).trace();
        }
        double z = pd + uvol.dot(grad) - (kap.d * grad.squaredNorm() + kap.v * lap) - fval;
        if (opt.sa_source) {
          const auto s0 = sa_source(pv, grad, adv.vorticity[cell * nq + qp],
                                    opt.wall_distance(x), opt.nu, opt.sa);
          z -= s0.value;
        }
        kdc = dc_diffusivity(opt.dc_y, z, grad, 2.0 * g.h, opt.dc_beta);
        diag.max_dc = std::max(diag.max_dc, kdc);
      }

      SASourceEval src;
      if (opt.sa_source) {
        src = sa_source(pv, grad, adv.vorticity[cell * nq + qp], opt.wall_distance(x), opt.nu,
                        opt.sa);
        if (src.clamped) ++diag.s_tilde_clamps;
      }

      for (int i = 0; i < nw; ++i) {
        double r = pd * w[i];
        r += -pv * uvol.dot(Gp.col(i));
        r += (kap.v + kdc) * grad.dot(Gp.col(i));
        r += -(src.value + fval) * w[i];
        R[i] += dx * r;

        for (int j = 0; j < nw; ++j) {
          double av = opt.w_rate * w[i] * w[j];
          double dv = -w[j] * uvol.dot(Gp.col(i));
          dv += (kap.v + kdc) * Gp.col(j).dot(Gp.col(i)) + kap.d * w[j] * grad.dot(Gp.col(i));
          if (opt.sa_source) dv += -(src.d_nu * w[j] + src.d_grad.dot(Gp.col(j))) * w[i];
          A(i, j) += dx * (av + opt.w_val * dv);
        }
      }
    }

    for (int l = 0; l < 3; ++l) {
      const int f = mesh.cell_facets[cell][l];
      const Facet& fc = mesh.facets[f];
      const bool fwd = fc.forward[side_of(fc, cell, l)];
      const Vec2 n = g.facet_normal[l];
      const double len = g.facet_length[l];
      const double pen = cpen / g.h;
      const MatrixXd& Wf = sp.facet_val(FieldKind::viscosity, l, fwd);
      const MatrixXd& Gf = sp.facet_grad(FieldKind::viscosity, l, fwd);
      const bool neumann = sp.scalar_neumann(f);
      const bool solved = sp.scalar_solved(f) >= 0;
      const int tb = sp.scalar_solved(f);
      const auto Ph = trace_full.segment(nfw * f, nfw);

      for (int qp = 0; qp < nqf; ++qp) {
        const double ds = fr.weights[qp] * len;
        const auto w = Wf.row(qp);
        const auto tw = Tw.row(qp);
        const MatrixXd Gp = phys_grad(Gf, qp, g.jac_inv);
        const double pv = w * Pl;
        const Vec2 grad = Gp * Pl;
        const double ph = tw * Ph;
        const double dphi = ph - pv;
        const int r = (cell * 3 + l) * nqf + qp;
        const Vec2 uint_ = adv.facet_int.row(r).transpose();
        const Vec2 uhat = adv.facet_trace.row(r).transpose();
        const Vec2 uflux = opt.trace_velocity_flux ? uhat : uint_;
        const double ufn = uflux.dot(n), uin = uint_.dot(n);
        const double lam_i = upwind_indicator(uin); // interior-equation lambda weight
        const Vec2 ucons = opt.trace_velocity_flux ? uhat : uint_;
        const double ucn = ucons.dot(n);
        const double lam_c = upwind_indicator(ucn);
        const double kap = opt.kappa(Jet1(pv)).v; // facet kappa: Picard-frozen
        const double gradn = grad.dot(n);

        for (int i = 0; i < nw; ++i) {
          double rr = ufn * pv * w[i];
          rr += lam_i * uin * dphi * w[i];
          rr += -kap * gradn * w[i];
          rr += kap * dphi * n.dot(Gp.col(i));
          rr += -pen * kap * dphi * w[i];
          R[i] += ds * rr;

          for (int j = 0; j < nw; ++j) {
            double dv = ufn * w[j] * w[i];
            dv += -lam_i * uin * w[j] * w[i];
            dv += -kap * Gp.col(j).dot(n) * w[i];
            dv += -kap * w[j] * n.dot(Gp.col(i));
            dv += pen * kap * w[j] * w[i];
            A(i, j) += opt.w_val * ds * dv;
          }
          if (solved)
            for (int m = 0; m < nfw; ++m) {
              double dv = lam_i * uin * tw[m] * w[i];
              dv += kap * tw[m] * n.dot(Gp.col(i));
              dv += -pen * kap * tw[m] * w[i];
              C(i, lt[l] + m) += ds * dv;
            }
        }

        if (solved) {
          const double hval =
              (neumann && opt.neumann)
                  ? opt.neumann(sp.facet_point(cell, l, fwd, fr.points(qp, 0)), opt.time)
                  : 0.0;
          for (int j = 0; j < nfw; ++j) {
            double rr = ufn * pv * tw[j];
            rr += lam_c * ucn * dphi * tw[j];
            rr += -kap * gradn * tw[j];
            rr += -pen * kap * dphi * tw[j];
            if (neumann) rr += -(1.0 - lam_c) * ucn * ph * tw[j] - hval * tw[j];
            bs.add_trace_rhs(tb + j, ds * rr);

            for (int j2 = 0; j2 < nw; ++j2) {
              double dv = ufn * w[j2] * tw[j];
              dv += -lam_c * ucn * w[j2] * tw[j];
              dv += -kap * Gp.col(j2).dot(n) * tw[j];
              dv += pen * kap * w[j2] * tw[j];
              B(lt[l] + j, j2) += opt.w_val * ds * dv;
            }
            for (int m = 0; m < nfw; ++m) {
              double dv = lam_c * ucn * tw[m] * tw[j];
              dv += -pen * kap * tw[m] * tw[j];
              if (neumann) dv += -(1.0 - lam_c) * ucn * tw[m] * tw[j];
              bs.add_trace(tb + j, tb + m, ds * dv);
            }
          }
        }
      }
    }

    bs.set_cell(cell, std::move(A), std::move(C), std::move(B), std::move(R), std::move(cols));
  }
  return diag;
}

} // namespace hdg
