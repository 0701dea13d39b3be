#include "hdg/sa.hpp"

#include <limits>

namespace hdg {

Jet1 sa_fv1(const Jet1& chi, const SAConstants& c) {
  const Jet1 chi3 = chi * chi * chi;
  return chi3 / (chi3 + c.c_v1 * c.c_v1 * c.c_v1);
}

Jet1 sa_fv2(const Jet1& chi, const SAConstants& c) {
  return Jet1(1.0) - chi / (Jet1(1.0) + chi * sa_fv1(chi, c));
}

Jet1 sa_fw(const Jet1& r, const SAConstants& c) {
  const Jet1 g = r + c.c_w2 * (pow(r, 6.0) - r);
  const double cw36 = std::pow(c.c_w3, 6);
  return g * pow((1.0 + cw36) / (pow(g, 6.0) + cw36), 1.0 / 6.0);
}

Jet1 sa_eddy_viscosity(const Jet1& nu_tilde, double nu, const SAConstants& c) {
  const Jet1 nut = nu_tilde * sa_fv1(nu_tilde / nu, c);
  return max(nut, 0.0);
}

Jet1 sa_diffusivity(const Jet1& nu_tilde, double nu, const SAConstants& c) {
  return max((nu_tilde + nu) * (1.0 / c.sigma), c.diffusion_floor * nu / c.sigma);
}

SASourceEval sa_source(double nu_tilde_v, const Vec2& grad, double vorticity,
                       double wall_distance, double nu, const SAConstants& c) {
  SASourceEval out;
  const double d = std::max(wall_distance, c.wall_distance_floor);
  const double kd2 = c.kappa * c.kappa * d * d;

  const Jet1 nt = Jet1::var(nu_tilde_v);
  if (nu_tilde_v < 0.0) {
    // negative branch: the f-functions have a pole at chi ~ -7.09 and the
    // squared destruction would push the state further negative, so use a
    // restorative analytic source instead (C^1 match at nu_tilde = 0)
    const Jet1 src =
        c.c_b1 * vorticity * nt + c.c_w1() * (nt / d) * (nt / d) + Jet1(c.c_b2 / c.sigma * grad.squaredNorm());
    out.value = src.v;
    out.d_nu = src.d;
    out.d_grad = 2.0 * c.c_b2 / c.sigma * grad;
    return out;
  }
  const Jet1 chi = nt / nu;
  const Jet1 fv2 = sa_fv2(chi, c);
  Jet1 s_tilde = vorticity + nt / kd2 * fv2;
  const double floor = c.s_tilde_floor * vorticity;
  if (s_tilde.v <= floor) {
    s_tilde = Jet1(floor);
    out.clamped = true;
  }

  Jet1 r(c.r_cap);
  if (s_tilde.v * kd2 > 0.0) r = min(nt / (s_tilde * kd2), c.r_cap);
  // symmetric lower cap: transient negative working-viscosity states would
  // otherwise drive r so far negative that g^6 overflows
  if (r.v < -c.r_cap) r = Jet1(-c.r_cap);
  const Jet1 fw = sa_fw(r, c);

  const Jet1 production = c.c_b1 * s_tilde * nt;
  const Jet1 destruction = c.c_w1() * fw * (nt / d) * (nt / d);
  const double grad2 = grad.squaredNorm();
  const Jet1 src = production - destruction + Jet1(c.c_b2 / c.sigma * grad2);

  out.value = src.v;
  out.d_nu = src.d;
  out.d_grad = 2.0 * c.c_b2 / c.sigma * grad;
  return out;
}

WallDistance::WallDistance(const Mesh& mesh) {
  for (const Facet& f : mesh.facets) {
    if (f.interior() || f.periodic || f.tag < 0) continue;
    if (mesh.tags.at(mesh.tag_names[f.tag]) != BoundaryKind::wall) continue;
    auto fg = mesh.facet_geometry(f.cell[0], f.local[0]);
    segments_.push_back({fg.a, fg.b});
  }
}

double WallDistance::operator()(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) {
    const Vec2 e = s[1] - s[0];
    const double t = std::clamp((x - s[0]).dot(e) / e.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (x - (s[0] + t * e)).norm());
  }
  return best;
}

} // namespace hdg
