#pragma once

#include "hdg/dual.hpp"
#include "hdg/mesh.hpp"

namespace hdg {

/// One-equation eddy-viscosity closure: algebraic functions of the working
/// variable, vorticity magnitude, and wall distance. No trip terms.
struct SAConstants {
  double sigma = 2.0 / 3.0;
  double c_b1 = 0.1355;
  double c_b2 = 0.622;
  double kappa = 0.41;
  double c_v1 = 7.1;
  double c_w2 = 0.3;
  double c_w3 = 2.0;
  double c_w1() const { return c_b1 / (kappa * kappa) + (1.0 + c_b2) / sigma; }

  double r_cap = 10.0;              // cap on the destruction argument r
  double s_tilde_floor = 0.3;       // S~ clamped below this multiple of |omega|
  double diffusion_floor = 0.1;     // (nu + nu_t) / sigma floored at this * nu / sigma
  double wall_distance_floor = 1e-12;
};

Jet1 sa_fv1(const Jet1& chi, const SAConstants& c);
Jet1 sa_fv2(const Jet1& chi, const SAConstants& c);
Jet1 sa_fw(const Jet1& r, const SAConstants& c);

/// nu_t = max(nu_tilde * f_v1, 0); tangent w.r.t. nu_tilde
Jet1 sa_eddy_viscosity(const Jet1& nu_tilde, double nu, const SAConstants& c);

struct SASourceEval {
  double value = 0;   // production - destruction + gradient term
  double d_nu = 0;    // tangent w.r.t. nu_tilde
  Vec2 d_grad{0, 0};  // tangent w.r.t. grad(nu_tilde)
  bool clamped = false; // S~ hit the vorticity floor
};

/// pointwise source of the working-variable equation:
///   c_b1 S~ nu_tilde - c_w1 f_w (nu_tilde / d)^2 + (c_b2 / sigma) |grad|^2
SASourceEval sa_source(double nu_tilde, const Vec2& grad_nu_tilde, double vorticity,
                       double wall_distance, double nu, const SAConstants& c);

/// (nu + nu_tilde) / sigma with a positivity floor; tangent w.r.t. nu_tilde
Jet1 sa_diffusivity(const Jet1& nu_tilde, double nu, const SAConstants& c);

/// Distance to the nearest wall-tagged boundary facet (exact point-to-segment
/// distance, brute force over wall facets).
class WallDistance {
public:
  explicit WallDistance(const Mesh& mesh);
  bool has_walls() const { return !segments_.empty(); }
  double operator()(const Vec2& x) const;

private:
  std::vector<std::array<Vec2, 2>> segments_;
};

} // namespace hdg
