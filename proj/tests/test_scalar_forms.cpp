#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdg/timestepper.hpp"

#include <random>

using namespace hdg;

namespace {

Mesh& test_mesh() {
  static Mesh m =
      structured_rectangle(0, 0, 1, 1, 2, 2, all_dirichlet_box(0, 0, 1, 1), SplitPattern::crossed);
  return m;
}

struct ScalarProbe {
  SpaceLayout sp;
  ScalarOptions opt;
  AdvectionField adv;
  VectorXd phidot, phi, trace;

  explicit ScalarProbe(int k)
      : sp(test_mesh(), make_opts(k)),
        adv(AdvectionField::from_function(
            sp, [](const Vec2& x, double) { return Vec2(0.8 + 0.1 * x.y(), 0.6 - 0.1 * x.x()); },
            0.0)) {
    opt.kappa = [](const Jet1&) { return Jet1(0.8); }; // constant: lag rule vacuous
    opt.nu = 0.05;
    opt.w_rate = 0.0;
    opt.w_val = 1.0;
    phidot = VectorXd::Zero(sp.n_viscosity_dofs());
    phi = VectorXd::Zero(sp.n_viscosity_dofs());
    trace = VectorXd::Zero(sp.n_scalar_trace_full());
  }

  static SpaceOptions make_opts(int k) {
    SpaceOptions so;
    so.k_flow = k;
    so.q_visc = k; // richer scalar space for the polynomial checks
    return so;
  }

  void randomize(unsigned seed, bool with_source) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-0.05, 0.05);
    phi = sp.project_scalar(FieldKind::viscosity,
                            [](const Vec2& x) { return 0.2 + 0.1 * x.x() * x.y(); });
    for (int f = 0; f < sp.n_facets(); ++f)
      trace.segment(sp.nfw() * f, sp.nfw()) =
          sp.project_facet(f, sp.nfw(), [](const Vec2& x) { return 0.2 + 0.1 * x.x() * x.y(); });
    for (int i = 0; i < phi.size(); ++i) phi[i] += U(rng);
    for (int i = 0; i < trace.size(); ++i) trace[i] += U(rng);
    for (int i = 0; i < phidot.size(); ++i) phidot[i] = U(rng);
    if (with_source) {
      opt.sa_source = true;
      opt.wall_distance = [](const Vec2& x) {
        return std::min({x.x(), 1 - x.x(), x.y(), 1 - x.y()}) + 0.05;
      };
    }
  }

  VectorXd residual() {
    BlockSystem bs(sp.n_cells(), sp.nw(), sp.n_scalar_trace_solved());
    assemble_scalar(sp, opt, adv, phidot, phi, trace, bs);
    VectorXd r(bs.n_cells() * sp.nw() + sp.n_scalar_trace_solved());
    r << bs.interior_residual(), bs.trace_rhs();
    return r;
  }

  Eigen::SparseMatrix<double> jacobian() {
    BlockSystem bs(sp.n_cells(), sp.nw(), sp.n_scalar_trace_solved());
    assemble_scalar(sp, opt, adv, phidot, phi, trace, bs);
    return bs.full_matrix();
  }

  void apply(const VectorXd& d, double scale, bool rates) {
    if (rates)
      phidot += scale * d.head(phidot.size());
    else
      phi += scale * d.head(phi.size());
    const VectorXd dt = scale * d.tail(sp.n_scalar_trace_solved());
    apply_scalar_trace_increment(sp, dt, trace);
  }
};

double fd_tangent_error(ScalarProbe& pr, bool rates, unsigned seed) {
  pr.opt.w_rate = rates ? 1.0 : 0.0;
  pr.opt.w_val = rates ? 0.0 : 1.0;
  const Eigen::SparseMatrix<double> J = pr.jacobian();
  std::mt19937 rng(seed);
  std::normal_distribution<double> N(0, 1);
  VectorXd d(J.rows());
  for (int i = 0; i < d.size(); ++i) d[i] = N(rng);
  if (rates) d.tail(pr.sp.n_scalar_trace_solved()).setZero();
  const double eps = 1e-6;
  const VectorXd pd0 = pr.phidot, p0 = pr.phi, t0 = pr.trace;
  pr.apply(d, eps, rates);
  const VectorXd rp = pr.residual();
  pr.phidot = pd0; pr.phi = p0; pr.trace = t0;
  pr.apply(d, -eps, rates);
  const VectorXd rm = pr.residual();
  pr.phidot = pd0; pr.phi = p0; pr.trace = t0;
  return ((rp - rm) / (2 * eps) - J * d).norm() / std::max(1.0, (J * d).norm());
}

} // namespace

TEST_CASE("value tangent matches central finite differences") {
  ScalarProbe pr(2);
  pr.randomize(11, /*with_source=*/true);
  for (unsigned s = 0; s < 3; ++s) CHECK(fd_tangent_error(pr, false, 700 + s) < 1e-6);
}

TEST_CASE("value tangent with a nonlinear diffusivity (volume terms full Newton)") {
  ScalarProbe pr(2);
  pr.randomize(12, /*with_source=*/false);
  pr.opt.kappa = [](const Jet1& n) { return Jet1(0.5) + Jet1(0.2) * n * n; };
  // the facet kappa is deliberately frozen; verify the volume Newton terms by
  // comparing against the assembled jacobian's own directional derivative
  // restricted to interior-only perturbations on a single-cell basis is
  // covered by the steady Newton convergence test below; here we check the
  // assembled tangent is still a descent-consistent approximation
  const double err = fd_tangent_error(pr, false, 71);
  CHECK(err < 0.05); // facet terms lagged: not exact, but close at small kappa'
}

TEST_CASE("rate tangent matches central finite differences") {
  ScalarProbe pr(2);
  pr.randomize(13, true);
  CHECK(fd_tangent_error(pr, true, 77) < 1e-6);
}

TEST_CASE("constant state with consistent advection has zero residual") {
  ScalarProbe pr(2);
  const double c = 0.37;
  pr.phi = pr.sp.project_scalar(FieldKind::viscosity, [c](const Vec2&) { return c; });
  for (int f = 0; f < pr.sp.n_facets(); ++f)
    pr.trace.segment(pr.sp.nfw() * f, pr.sp.nfw()) =
        c * pr.sp.project_facet(f, pr.sp.nfw(), [](const Vec2&) { return 1.0; });
  CHECK(pr.residual().norm() < 1e-11);
}

TEST_CASE("polynomial diffusion solution is reproduced exactly") {
  ScalarProbe pr(2); // q = 2
  const auto exact = [](const Vec2& x) {
    return x.x() * x.x() + x.x() * x.y() + 2.0 * x.y() * x.y();
  };
  ScalarOptions so;
  so.kappa = [](const Jet1&) { return Jet1(0.8); };
  so.forcing = [](const Vec2&, double) { return -0.8 * 6.0; }; // -kappa * lap(exact)
  const AdvectionField still =
      AdvectionField::from_function(pr.sp, [](const Vec2&, double) { return Vec2(0, 0); }, 0.0);
  ScalarState st = ScalarState::zero(pr.sp);
  pr.sp.set_scalar_dirichlet(st.trace, [&](const Vec2& x, double) { return exact(x); }, 0.0);
  const SolveReport rep = solve_scalar_steady(pr.sp, so, still, st);
  CHECK(rep.converged);
  CHECK(pr.sp.l2_error_scalar(FieldKind::viscosity, st.phi, exact, 8) < 1e-11);
}

TEST_CASE("steady Newton converges quadratically with a nonlinear diffusivity") {
  ScalarProbe pr(2);
  ScalarOptions so;
  so.kappa = [](const Jet1& n) { return Jet1(0.5) + Jet1(0.3) * n * n; };
  so.forcing = [](const Vec2& x, double) { return std::sin(3 * x.x()) + x.y(); };
  const AdvectionField still =
      AdvectionField::from_function(pr.sp, [](const Vec2&, double) { return Vec2(0, 0); }, 0.0);
  ScalarState st = ScalarState::zero(pr.sp);
  NewtonOptions no;
  no.rel_tol = 1e-12;
  const SolveReport rep = solve_scalar_steady(pr.sp, so, still, st, no);
  CHECK(rep.converged);
  CHECK(rep.iters <= 6); // facet lag costs a few extra sweeps at most
}

TEST_CASE("discontinuity-capturing diffusivity formula") {
  // beta = 2: kdc = |Z / Y| * (h/2)^2 independent of the gradient
  CHECK(dc_diffusivity(2.0, 3.0, Vec2(9, 9), 0.5, 2.0) ==
        doctest::Approx(1.5 * 0.0625).epsilon(1e-12));
  // beta = 1: kdc = |Z/Y| * (|grad/Y|^2)^{-1/2} * (h/2), up to regularization
  const double kdc = dc_diffusivity(2.0, 3.0, Vec2(4, 0), 0.5, 1.0);
  CHECK(kdc == doctest::Approx(1.5 / 2.0 * 0.25).epsilon(1e-6));
  // zero residual: no added diffusivity
  CHECK(dc_diffusivity(1.0, 0.0, Vec2(1, 0), 0.5, 2.0) == 0.0);
}

TEST_CASE("capturing vanishes on a resolved solution") {
  ScalarProbe pr(2);
  const auto exact = [](const Vec2& x) { return x.x() + 2 * x.y(); };
  pr.phi = pr.sp.project_scalar(FieldKind::viscosity, exact);
  for (int f = 0; f < pr.sp.n_facets(); ++f)
    pr.trace.segment(pr.sp.nfw() * f, pr.sp.nfw()) = pr.sp.project_facet(f, pr.sp.nfw(), exact);
  pr.opt.dc = true;
  pr.opt.forcing = [&](const Vec2& x, double) {
    // advective strong residual of the exact linear field
    const Vec2 u(0.8 + 0.1 * x.y(), 0.6 - 0.1 * x.x());
    return u.dot(Vec2(1, 2));
  };
  BlockSystem bs(pr.sp.n_cells(), pr.sp.nw(), pr.sp.n_scalar_trace_solved());
  const ScalarDiagnostics diag =
      assemble_scalar(pr.sp, pr.opt, pr.adv, pr.phidot, pr.phi, pr.trace, bs);
  CHECK(diag.max_dc < 1e-10);
}
