#pragma once

#include "hdg/block_system.hpp"
#include "hdg/fespace.hpp"
#include "hdg/sa.hpp"

#include <functional>

namespace hdg {

/// Eddy viscosity sampled at the shared cell and facet quadrature points.
/// cell(c*nq + q); facet((c*3 + l)*nqf + q) for local facet l of cell c.
struct EddyField {
  VectorXd cell, facet;
  static EddyField zero(const SpaceLayout& sp);
  /// nu_t = max(nu_tilde f_v1, 0) from the working-viscosity DOFs
  static EddyField from_state(const SpaceLayout& sp, const VectorXd& phi, double nu,
                              const SAConstants& c);
};

struct FlowOptions {
  double rho = 1.0;
  double nu = 1.0;
  bool advection = true;
  /// tangent weights for the velocity interior unknowns: the solved increment
  /// is the rate, so columns combine w_rate d/d(udot) + w_val d/du.
  /// Transient: (alpha_m, alpha_f*gamma*dt); steady: (0, 1) with udot = 0.
  double w_rate = 0.0;
  double w_val = 1.0;
  double time = 0.0;
  std::function<Vec2(const Vec2&, double)> body_force; // f, optional
  std::function<Vec2(const Vec2&, double)> traction;   // h on the Neumann boundary, optional
};

/// Assemble residual and tangent of the flow system (continuity, momentum,
/// and their conservativity conditions) into bs. Interior layout per cell:
/// [udot_x (nv), udot_y (nv), p (np)]; trace layout per SpaceLayout's solved
/// flow map, with the mean-pressure multiplier last when present.
/// The states passed in are the ones the residual is evaluated at (the
/// caller forms any alpha-level combinations).
void assemble_flow(const SpaceLayout& sp, const FlowOptions& opt, const EddyField& nu_t,
                   const VectorXd& udot, const VectorXd& u, const VectorXd& p,
                   const VectorXd& trace_full, double xi, BlockSystem& bs);

/// (max |div u| at cell quadrature points, max |[[u]]| at facet quadrature
/// points) -- the two pointwise mass-conservation measures
std::pair<double, double> check_divergence(const SpaceLayout& sp, const VectorXd& u);

/// 0.5 * integral of |u|^2
double kinetic_energy(const SpaceLayout& sp, const VectorXd& u);

/// integral of u over the domain, per component
Vec2 momentum_integral(const SpaceLayout& sp, const VectorXd& u);

} // namespace hdg
