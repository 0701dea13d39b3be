#include "hdg/timestepper.hpp"

#include <cmath>

namespace hdg {

FlowState FlowState::zero(const SpaceLayout& sp) {
  FlowState st;
  st.u = VectorXd::Zero(sp.n_velocity_dofs());
  st.udot = VectorXd::Zero(sp.n_velocity_dofs());
  st.p = VectorXd::Zero(sp.n_pressure_dofs());
  st.trace = VectorXd::Zero(sp.n_flow_trace_full());
  return st;
}

ScalarState ScalarState::zero(const SpaceLayout& sp) {
  ScalarState st;
  st.phi = VectorXd::Zero(sp.n_viscosity_dofs());
  st.phidot = VectorXd::Zero(sp.n_viscosity_dofs());
  st.trace = VectorXd::Zero(sp.n_scalar_trace_full());
  return st;
}

void apply_flow_trace_increment(const SpaceLayout& sp, const VectorXd& d, VectorXd& trace_full,
                                double& xi) {
  const int nfv = sp.nfv();
  for (int f = 0; f < sp.n_facets(); ++f) {
    const int ub = sp.flow_solved_u(f);
    if (ub >= 0) trace_full.segment(3 * nfv * f, 2 * nfv) += d.segment(ub, 2 * nfv);
    trace_full.segment(3 * nfv * f + 2 * nfv, nfv) += d.segment(sp.flow_solved_p(f), nfv);
  }
  if (sp.has_pressure_constraint()) xi += d[sp.multiplier_index()];
}

void apply_scalar_trace_increment(const SpaceLayout& sp, const VectorXd& d,
                                  VectorXd& trace_full) {
  const int nfw = sp.nfw();
  for (int f = 0; f < sp.n_facets(); ++f) {
    const int tb = sp.scalar_solved(f);
    if (tb >= 0) trace_full.segment(nfw * f, nfw) += d.segment(tb, nfw);
  }
}

namespace {

bool check_convergence(const BlockSystem& bs, const NewtonOptions& no, SolveReport& rep,
                       int it) {
  const double r = std::hypot(bs.interior_residual_norm(), bs.trace_residual_norm());
  if (it == 0) rep.residual0 = r;
  rep.residual = r;
  rep.iters = it;
  rep.converged = r <= std::max(no.rel_tol * rep.residual0, no.abs_tol);
  return rep.converged;
}

// backtracking line search: halve the step until the residual norm drops;
// accept the last trial unconditionally so progress never stops entirely.
// trial(alpha) sets the state and assembles; the accepted system is kept so
// the next Newton iteration does not re-assemble.
template <class Trial>
void backtrack(double r0, Trial&& trial, int max_halvings = 8) {
  double alpha = 1.0;
  for (int i = 0; i < max_halvings; ++i) {
    if (trial(alpha) < r0) return;
    alpha *= 0.5;
  }
  trial(alpha);
}

} // namespace

SolveReport solve_flow_steady(const SpaceLayout& sp, FlowOptions opt, const EddyField& nu_t,
                              FlowState& st, const NewtonOptions& no) {
  opt.w_rate = 0.0;
  opt.w_val = 1.0;
  const int ni = 2 * sp.nv() + sp.np();
  const VectorXd zero_rate = VectorXd::Zero(sp.n_velocity_dofs());
  const auto assemble = [&] {
    auto bs = std::make_unique<BlockSystem>(sp.n_cells(), ni, sp.n_flow_trace_solved());
    assemble_flow(sp, opt, nu_t, zero_rate, st.u, st.p, st.trace, st.xi, *bs);
    return bs;
  };
  SolveReport rep;
  auto bs = assemble();
  for (int it = 0; it <= no.max_iters; ++it) {
    if (check_convergence(*bs, no, rep, it) || it == no.max_iters) break;
    const VectorXd dt = bs->solve_condensed();
    const VectorXd di = bs->recover_interior(dt);
    const VectorXd u0 = st.u, p0 = st.p, tr0 = st.trace;
    const double xi0 = st.xi;
    backtrack(rep.residual, [&](double a) {
      st.u = u0;
      st.p = p0;
      st.trace = tr0;
      st.xi = xi0;
      for (int c = 0; c < sp.n_cells(); ++c) {
        st.u.segment(c * 2 * sp.nv(), 2 * sp.nv()) += a * di.segment(c * ni, 2 * sp.nv());
        st.p.segment(c * sp.np(), sp.np()) += a * di.segment(c * ni + 2 * sp.nv(), sp.np());
      }
      const VectorXd s = a * dt;
      apply_flow_trace_increment(sp, s, st.trace, st.xi);
      bs = assemble();
      return std::hypot(bs->interior_residual_norm(), bs->trace_residual_norm());
    });
  }
  return rep;
}

SolveReport solve_scalar_steady(const SpaceLayout& sp, ScalarOptions opt,
                                const AdvectionField& adv, ScalarState& st,
                                const NewtonOptions& no) {
  opt.w_rate = 0.0;
  opt.w_val = 1.0;
  const VectorXd zero_rate = VectorXd::Zero(sp.n_viscosity_dofs());
  const auto assemble = [&] {
    auto bs = std::make_unique<BlockSystem>(sp.n_cells(), sp.nw(), sp.n_scalar_trace_solved());
    assemble_scalar(sp, opt, adv, zero_rate, st.phi, st.trace, *bs);
    return bs;
  };
  SolveReport rep;
  auto bs = assemble();
  for (int it = 0; it <= no.max_iters; ++it) {
    if (check_convergence(*bs, no, rep, it) || it == no.max_iters) break;
    const VectorXd dt = bs->solve_condensed();
    const VectorXd di = bs->recover_interior(dt);
    const VectorXd phi0 = st.phi, tr0 = st.trace;
    backtrack(rep.residual, [&](double a) {
      st.phi = phi0 + a * di;
      st.trace = tr0;
      const VectorXd s = a * dt;
      apply_scalar_trace_increment(sp, s, st.trace);
      bs = assemble();
      return std::hypot(bs->interior_residual_norm(), bs->trace_residual_norm());
    });
  }
  return rep;
}

SolveReport advance_flow(const SpaceLayout& sp, FlowOptions opt, const EddyField& nu_t,
                         const GenAlphaParams& ga, double t_n, double dt, FlowState& st,
                         const NewtonOptions& no) {
  const double am = ga.alpha_m(), af = ga.alpha_f(), g = ga.gamma();
  const VectorXd u_n = st.u, udot_n = st.udot;
  st.udot = ((g - 1.0) / g) * udot_n; // same-value predictor
  opt.w_rate = am;
  opt.w_val = af * g * dt;
  opt.time = t_n + af * dt;
  const int ni = 2 * sp.nv() + sp.np();
  const auto assemble = [&] {
    auto bs = std::make_unique<BlockSystem>(sp.n_cells(), ni, sp.n_flow_trace_solved());
    assemble_flow(sp, opt, nu_t, udot_n + am * (st.udot - udot_n), u_n + af * (st.u - u_n),
                  st.p, st.trace, st.xi, *bs);
    return bs;
  };
  SolveReport rep;
  auto bs = assemble();
  for (int it = 0; it <= no.max_iters; ++it) {
    if (check_convergence(*bs, no, rep, it) || it == no.max_iters) break;
    const VectorXd dt_tr = bs->solve_condensed();
    const VectorXd di = bs->recover_interior(dt_tr);
    const VectorXd u0 = st.u, ud0 = st.udot, p0 = st.p, tr0 = st.trace;
    const double xi0 = st.xi;
    backtrack(rep.residual, [&](double a) {
      st.u = u0;
      st.udot = ud0;
      st.p = p0;
      st.trace = tr0;
      st.xi = xi0;
      for (int c = 0; c < sp.n_cells(); ++c) {
        const VectorXd dr = a * di.segment(c * ni, 2 * sp.nv());
        st.udot.segment(c * 2 * sp.nv(), 2 * sp.nv()) += dr;
        st.u.segment(c * 2 * sp.nv(), 2 * sp.nv()) += g * dt * dr;
        st.p.segment(c * sp.np(), sp.np()) += a * di.segment(c * ni + 2 * sp.nv(), sp.np());
      }
      const VectorXd s = a * dt_tr;
      apply_flow_trace_increment(sp, s, st.trace, st.xi);
      bs = assemble();
      return std::hypot(bs->interior_residual_norm(), bs->trace_residual_norm());
    });
  }
  return rep;
}

SolveReport advance_scalar(const SpaceLayout& sp, ScalarOptions opt, const AdvectionField& adv,
                           const GenAlphaParams& ga, double t_n, double dt, ScalarState& st,
                           const NewtonOptions& no) {
  const double am = ga.alpha_m(), af = ga.alpha_f(), g = ga.gamma();
  const VectorXd phi_n = st.phi, phidot_n = st.phidot;
  st.phidot = ((g - 1.0) / g) * phidot_n;
  opt.w_rate = am;
  opt.w_val = af * g * dt;
  opt.time = t_n + af * dt;
  const auto assemble = [&] {
    auto bs = std::make_unique<BlockSystem>(sp.n_cells(), sp.nw(), sp.n_scalar_trace_solved());
    assemble_scalar(sp, opt, adv, phidot_n + am * (st.phidot - phidot_n),
                    phi_n + af * (st.phi - phi_n), st.trace, *bs);
    return bs;
  };
  SolveReport rep;
  auto bs = assemble();
  for (int it = 0; it <= no.max_iters; ++it) {
    if (check_convergence(*bs, no, rep, it) || it == no.max_iters) break;
    const VectorXd dt_tr = bs->solve_condensed();
    const VectorXd di = bs->recover_interior(dt_tr);
    const VectorXd phi0 = st.phi, pd0 = st.phidot, tr0 = st.trace;
    backtrack(rep.residual, [&](double a) {
      st.phidot = pd0 + a * di;
      st.phi = phi0 + g * dt * a * di;
      st.trace = tr0;
      const VectorXd s = a * dt_tr;
      apply_scalar_trace_increment(sp, s, st.trace);
      bs = assemble();
      return std::hypot(bs->interior_residual_norm(), bs->trace_residual_norm());
    });
  }
  return rep;
}

} // namespace hdg
