#pragma once

#include "hdg/timestepper.hpp"

#include <vector>

namespace hdg::mms {

/// Closed-form steady vortex on the unit square with a prescribed working
/// viscosity; forcings make it an exact solution of the full coupled system.
struct ExactFields {
  double nu = 1e-2;
  double theta = 1.0; // working-viscosity amplitude
  SAConstants sa;

  Vec2 velocity(const Vec2& x) const;
  Mat2 velocity_gradient(const Vec2& x) const;
  double pressure(const Vec2& x) const;       // nonzero mean over the square
  double pressure_mean() const;               // subtracted when comparing
  double nu_tilde(const Vec2& x) const;
  Vec2 nu_tilde_gradient(const Vec2& x) const;
  double eddy_viscosity(const Vec2& x) const;
  double wall_distance(const Vec2& x) const;  // distance to the square's boundary

  Vec2 momentum_forcing(const Vec2& x) const;
  double sa_forcing(const Vec2& x) const;
};

struct CaseOptions {
  int max_outer = 60;       // flow/scalar alternation sweeps
  double outer_tol = 1e-11; // relative state change between sweeps
  NewtonOptions newton{.max_iters = 20, .rel_tol = 1e-10};
  bool discontinuity_capturing = false;
  int q_visc = -1;
  int quad_order = -1; // default 2k+8: nu_T(nu_tilde) varies steeply where chi ~ c_v1
};

struct CaseResult {
  double h = 0;
  double err_u = 0, err_p = 0, err_nu = 0;
  double max_div = 0, max_jump = 0;
  int outer_iters = 0;
  bool converged = false;
};

/// solve the manufactured problem on an n x n crossed mesh at degree k
CaseResult run_case(int n, int k, const ExactFields& ex, const CaseOptions& co = {});

/// least-squares slope of log(err) against log(h)
double fit_rate(const std::vector<double>& h, const std::vector<double>& err);

struct Study {
  std::vector<int> sizes{8, 16, 32};
  std::vector<CaseResult> cases;
  double rate_u = 0, rate_p = 0, rate_nu = 0;
};

Study convergence_study(int k, const ExactFields& ex, const std::vector<int>& sizes,
                        const CaseOptions& co = {});

} // namespace hdg::mms
