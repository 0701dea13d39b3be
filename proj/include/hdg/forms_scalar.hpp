#pragma once

#include "hdg/block_system.hpp"
#include "hdg/dual.hpp"
#include "hdg/fespace.hpp"
#include "hdg/sa.hpp"

#include <functional>

namespace hdg {

/// Advecting velocity sampled at the shared quadrature points: interior values
/// at cell points, and both interior-side and trace values at facet points.
/// cell index c*nq+q; facet index (c*3+l)*nqf+q.
struct AdvectionField {
  MatrixXd cell;        // (n_cells*nq) x 2
  VectorXd vorticity;   // |omega| at cell points (used by the SA source)
  MatrixXd facet_int;   // interior-side velocity at facet points
  MatrixXd facet_trace; // trace velocity at facet points

  static AdvectionField from_flow(const SpaceLayout& sp, const VectorXd& u,
                                  const VectorXd& flow_trace_full);
  static AdvectionField from_function(const SpaceLayout& sp,
                                      const std::function<Vec2(const Vec2&, double)>& f, double t);
};

/// YZ-beta artificial diffusivity from the pointwise residual Z
double dc_diffusivity(double y_ref, double z_residual, const Vec2& grad_phi, double h_dc,
                      double beta);

struct ScalarOptions {
  /// diffusivity as a function of phi (tangent uses its derivative in the
  /// volume term only; facet occurrences are Picard-frozen)
  std::function<Jet1(const Jet1&)> kappa;
  std::function<double(const Vec2&, double)> forcing; // optional
  std::function<double(const Vec2&, double)> neumann; // h, optional
  /// turbulence-model source: adds -(c_b1 S~ phi - c_w1 f_w (phi/d)^2 + (c_b2/sigma)|grad|^2)
  bool sa_source = false;
  SAConstants sa;
  double nu = 0.0; // physical viscosity for the SA chain
  std::function<double(const Vec2&)> wall_distance;
  /// use the trace velocity in the facet advective flux and conservativity
  /// terms (the coupled turbulence-model form); off = plain scalar transport
  bool trace_velocity_flux = false;
  bool dc = false; // discontinuity capturing
  double dc_y = 1.0;
  double dc_beta = 2.0;
  double w_rate = 0.0;
  double w_val = 1.0;
  double time = 0.0;
};

struct ScalarDiagnostics {
  int s_tilde_clamps = 0;
  double max_dc = 0.0;
};

/// Assemble the scalar residual/tangent into bs (interior = nw rows per cell,
/// trace = solved scalar map). States are the evaluation-level vectors.
ScalarDiagnostics assemble_scalar(const SpaceLayout& sp, const ScalarOptions& opt,
                                  const AdvectionField& adv, const VectorXd& phidot,
                                  const VectorXd& phi, const VectorXd& trace_full,
                                  BlockSystem& bs);

} // namespace hdg
