#pragma once

#include "hdg/forms_rans.hpp"
#include "hdg/forms_scalar.hpp"

namespace hdg {

/// Generalized-alpha parameters from the spectral radius at infinity.
struct GenAlphaParams {
  double rho_inf = 0.5;
  double alpha_m() const { return 0.5 * (3.0 - rho_inf) / (1.0 + rho_inf); }
  double alpha_f() const { return 1.0 / (1.0 + rho_inf); }
  double gamma() const { return 0.5 + alpha_m() - alpha_f(); }
};

struct NewtonOptions {
  int max_iters = 10;
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
};

struct SolveReport {
  int iters = 0;
  double residual0 = 0.0, residual = 0.0;
  bool converged = false;
};

struct FlowState {
  VectorXd u, udot, p, trace; // trace in full flow layout (uhat, phat per facet)
  double xi = 0.0;            // mean-pressure multiplier
  static FlowState zero(const SpaceLayout& sp);
};

struct ScalarState {
  VectorXd phi, phidot, trace; // trace in full scalar layout
  static ScalarState zero(const SpaceLayout& sp);
};

/// scatter a solved-trace increment into the full trace layout
void apply_flow_trace_increment(const SpaceLayout& sp, const VectorXd& d, VectorXd& trace_full,
                                double& xi);
void apply_scalar_trace_increment(const SpaceLayout& sp, const VectorXd& d,
                                  VectorXd& trace_full);

/// Newton on the steady residual (rates zero, value weight one). The state's
/// Dirichlet trace entries must already be set.
SolveReport solve_flow_steady(const SpaceLayout& sp, FlowOptions opt, const EddyField& nu_t,
                              FlowState& st, const NewtonOptions& no = {});
SolveReport solve_scalar_steady(const SpaceLayout& sp, ScalarOptions opt,
                                const AdvectionField& adv, ScalarState& st,
                                const NewtonOptions& no = {});

/// One generalized-alpha step t_n -> t_n + dt. The residual is evaluated at
/// rates at n+alpha_m, values at n+alpha_f, traces at n+1; the solved interior
/// unknown is the rate increment (values follow with gamma*dt). Dirichlet
/// trace entries must hold their t_{n+1} data before the call.
SolveReport advance_flow(const SpaceLayout& sp, FlowOptions opt, const EddyField& nu_t,
                         const GenAlphaParams& ga, double t_n, double dt, FlowState& st,
                         const NewtonOptions& no = {});
SolveReport advance_scalar(const SpaceLayout& sp, ScalarOptions opt, const AdvectionField& adv,
                           const GenAlphaParams& ga, double t_n, double dt, ScalarState& st,
                           const NewtonOptions& no = {});

} // namespace hdg
