#include "hdg/driver.hpp"

#include "hdg/expr.hpp"
#include "hdg/mms.hpp"
#include "hdg/vtk.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hdg {

namespace {

using nlohmann::json;

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

BoundaryKind parse_kind(const std::string& s, std::vector<std::string>& errors) {
  if (s == "dirichlet") return BoundaryKind::dirichlet;
  if (s == "neumann") return BoundaryKind::neumann;
  if (s == "wall") return BoundaryKind::wall;
  errors.push_back("unknown boundary kind '" + s + "' (dirichlet, neumann, or wall)");
  return BoundaryKind::dirichlet;
}

Expr parse_expr(Config& cfg, const std::string& key, const std::string& def,
                std::vector<std::string>& errors) {
  const std::string text = cfg.get_string(key, def);
  try {
    return Expr::parse(text);
  } catch (const std::exception& e) {
    errors.push_back(std::string("key '") + key + "': " + e.what());
    return Expr::parse("0");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

} // namespace

int run_mms_command(Config& cfg, const std::string& out_dir) {
  mms::ExactFields ex;
  ex.nu = cfg.get_double("mms.nu", 1e-2);
  ex.theta = cfg.get_double("mms.theta", 1.0);
  const std::vector<int> degrees = parse_int_list(cfg.get_string("mms.degrees", "2,3"));
  const std::vector<int> sizes = parse_int_list(cfg.get_string("mms.sizes", "8,16,32"));
  mms::CaseOptions co;
  co.discontinuity_capturing = cfg.get_bool("mms.dc", false);
  co.q_visc = cfg.get_int("mms.q", -1);
  cfg.finalize();
  if (!cfg.ok()) {
    std::cerr << cfg.error_report();
    return 2;
  }

  std::filesystem::create_directories(out_dir);
  std::ostringstream csv;
  csv << "k,n,h,err_u,err_p,err_nu,max_div,max_jump,outer_iters\n";
  json summary;
  bool all_converged = true;
  for (int k : degrees) {
    const mms::Study st = mms::convergence_study(k, ex, sizes, co);
    json jk;
    for (size_t i = 0; i < st.cases.size(); ++i) {
      const auto& c = st.cases[i];
      csv << k << "," << sizes[i] << "," << c.h << "," << c.err_u << "," << c.err_p << ","
          << c.err_nu << "," << c.max_div << "," << c.max_jump << "," << c.outer_iters << "\n";
      all_converged = all_converged && c.converged;
      jk["cases"].push_back({{"n", sizes[i]},
                             {"err_u", c.err_u},
                             {"err_p", c.err_p},
                             {"err_nu", c.err_nu},
                             {"max_div", c.max_div}});
    }
    jk["rate_u"] = st.rate_u;
    jk["rate_p"] = st.rate_p;
    jk["rate_nu"] = st.rate_nu;
    summary["k" + std::to_string(k)] = jk;
    std::cout << "k=" << k << "  rate_u=" << st.rate_u << "  rate_p=" << st.rate_p
              << "  rate_nu=" << st.rate_nu << "\n";
  }
  write_text(out_dir + "/mms_convergence.csv", csv.str());
  write_text(out_dir + "/summary.json", summary.dump(2) + "\n");
  return all_converged ? 0 : 3;
}

int run_transient_command(Config& cfg, const std::string& out_dir) {
  std::vector<std::string> errors;

  const double x0 = cfg.get_double("mesh.x0", 0), y0 = cfg.get_double("mesh.y0", 0);
  const double x1 = cfg.get_double("mesh.x1", 1), y1 = cfg.get_double("mesh.y1", 1);
  const int nx = cfg.get_int("mesh.nx", 8), ny = cfg.get_int("mesh.ny", 8);
  const std::string split_s = cfg.get_string("mesh.split", "crossed");
  const double grade_y = cfg.get_double("mesh.grade_y", 1.0);
  const bool periodic_x = cfg.get_bool("mesh.periodic_x", false);

  const auto kind_left = parse_kind(cfg.get_string("bc.left", "dirichlet"), errors);
  const auto kind_right = parse_kind(cfg.get_string("bc.right", "dirichlet"), errors);
  const auto kind_bottom = parse_kind(cfg.get_string("bc.bottom", "dirichlet"), errors);
  const auto kind_top = parse_kind(cfg.get_string("bc.top", "dirichlet"), errors);

  const Expr bc_u = parse_expr(cfg, "bc.u", "0", errors);
  const Expr bc_v = parse_expr(cfg, "bc.v", "0", errors);
  const Expr bc_hx = parse_expr(cfg, "bc.hx", "0", errors);
  const Expr bc_hy = parse_expr(cfg, "bc.hy", "0", errors);
  const Expr bc_scalar = parse_expr(cfg, "bc.scalar", "0", errors);

  const double nu = cfg.get_double("flow.nu", 1.0);
  const double rho = cfg.get_double("flow.rho", 1.0);
  const Expr fx = parse_expr(cfg, "flow.fx", "0", errors);
  const Expr fy = parse_expr(cfg, "flow.fy", "0", errors);

  const bool sa_on = cfg.get_bool("scalar.enabled", false);
  const Expr scalar_init = parse_expr(cfg, "scalar.init", "0", errors);

  const int k = cfg.get_int("degree.k", 2);
  const int q = cfg.get_int("degree.q", -1);

  const double dt = cfg.get_double("time.dt", 0.1);
  const int steps = cfg.get_int("time.steps", 100);
  const double rho_inf = cfg.get_double("time.rho_inf", 0.5);
  const double steady_tol = cfg.get_double("time.steady_tol", 1e-8);
  NewtonOptions no;
  no.max_iters = cfg.get_int("time.newton_iters", 10);
  no.rel_tol = cfg.get_double("time.newton_tol", 1e-6);
  const int vtk_every = cfg.get_int("output.vtk_every", 0);

  cfg.finalize();
  for (const auto& e : cfg.errors()) errors.push_back(e);
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << e << "\n";
    return 2;
  }

  std::vector<PeriodicRule> periodic;
  if (periodic_x) periodic.push_back({"left", "right", Vec2(x1 - x0, 0)});
  Mesh mesh;
  try {
    mesh = structured_rectangle(
        x0, y0, x1, y1, nx, ny,
        box_rules(x0, y0, x1, y1, periodic_x ? BoundaryKind::periodic : kind_left,
                  periodic_x ? BoundaryKind::periodic : kind_right, kind_bottom, kind_top),
        split_s == "diagonal" ? SplitPattern::diagonal : SplitPattern::crossed, grade_y,
        periodic);
  } catch (const std::exception& e) {
    std::cerr << "mesh construction failed: " << e.what() << "\n";
    return 2;
  }

  SpaceOptions so;
  so.k_flow = k;
  so.q_visc = q;
  SpaceLayout sp(mesh, so);
  const WallDistance wd(mesh);

  FlowState fs = FlowState::zero(sp);
  ScalarState ss = ScalarState::zero(sp);
  const auto flow_bc = [&](const Vec2& x, double t) { return Vec2(bc_u(x.x(), x.y(), t),
                                                                  bc_v(x.x(), x.y(), t)); };
  const auto scalar_bc = [&](const Vec2& x, double t) { return bc_scalar(x.x(), x.y(), t); };
  sp.set_flow_dirichlet(fs.trace, flow_bc, 0.0);

  FlowOptions fo;
  fo.nu = nu;
  fo.rho = rho;
  fo.body_force = [&](const Vec2& x, double t) { return Vec2(fx(x.x(), x.y(), t),
                                                             fy(x.x(), x.y(), t)); };
  fo.traction = [&](const Vec2& x, double t) { return Vec2(bc_hx(x.x(), x.y(), t),
                                                           bc_hy(x.x(), x.y(), t)); };

  ScalarOptions sco;
  sco.nu = nu;
  sco.kappa = [nu, c = SAConstants{}](const Jet1& nt) { return sa_diffusivity(nt, nu, c); };
  sco.sa_source = true;
  sco.trace_velocity_flux = true;
  sco.dc = true;
  sco.wall_distance = [&wd](const Vec2& x) { return wd.has_walls() ? wd(x) : 1e6; };

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/steps.csv");
  csv << "step,t,flow_iters,flow_res,scalar_iters,scalar_res,ke,max_div,max_jump,rel_change\n";

  // initialize: steady Stokes flow plus the configured working viscosity
  try {
    FlowOptions init = fo;
    init.advection = false;
    init.w_rate = 0;
    init.w_val = 1;
    solve_flow_steady(sp, init, EddyField::zero(sp), fs, no);
    if (sa_on) {
      ss.phi = sp.project_scalar(FieldKind::viscosity, [&](const Vec2& x) {
        return scalar_init(x.x(), x.y(), 0.0);
      });
      for (int f = 0; f < sp.n_facets(); ++f)
        ss.trace.segment(sp.nfw() * f, sp.nfw()) = sp.project_facet(
            f, sp.nfw(), [&](const Vec2& x) { return scalar_init(x.x(), x.y(), 0.0); });
      sp.set_scalar_dirichlet(ss.trace, scalar_bc, 0.0);
    }
  } catch (const std::exception& e) {
    std::cerr << "initialization failed: " << e.what() << "\n";
    return 3;
  }

  const GenAlphaParams ga{rho_inf};
  double t = 0.0;
  json summary;
  int step = 0;
  bool steady = false;
  try {
    for (step = 1; step <= steps; ++step) {
      const VectorXd u_prev = fs.u;
      const EddyField nu_t =
          sa_on ? EddyField::from_state(sp, ss.phi, nu, SAConstants{}) : EddyField::zero(sp);
      const AdvectionField adv = AdvectionField::from_flow(sp, fs.u, fs.trace);

      sp.set_flow_dirichlet(fs.trace, flow_bc, t + dt);
      const SolveReport fr = advance_flow(sp, fo, nu_t, ga, t, dt, fs, no);
      SolveReport sr;
      if (sa_on) {
        sp.set_scalar_dirichlet(ss.trace, scalar_bc, t + dt);
        sr = advance_scalar(sp, sco, adv, ga, t, dt, ss, no);
      }
      t += dt;

      const auto [max_div, max_jump] = check_divergence(sp, fs.u);
      const double ke = kinetic_energy(sp, fs.u);
      const double rel_change = (fs.u - u_prev).norm() / (dt * std::max(1.0, fs.u.norm()));
      csv << step << "," << t << "," << fr.iters << "," << fr.residual << "," << sr.iters << ","
          << sr.residual << "," << ke << "," << max_div << "," << max_jump << "," << rel_change
          << "\n";
      if (vtk_every > 0 && step % vtk_every == 0)
        write_vtk(out_dir + "/step_" + std::to_string(step) + ".vtk", sp, fs,
                  sa_on ? &ss : nullptr, nu);
      if (!fr.converged && fr.residual > 1e3 * std::max(fr.residual0, 1.0))
        throw std::runtime_error("flow corrector diverged at step " + std::to_string(step));
      if (rel_change < steady_tol) {
        steady = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "time marching failed: " << e.what() << "\n";
    return 3;
  }

  write_vtk(out_dir + "/final.vtk", sp, fs, sa_on ? &ss : nullptr, nu);
  const auto [max_div, max_jump] = check_divergence(sp, fs.u);
  summary["steps"] = std::min(step, steps);
  summary["time"] = t;
  summary["steady"] = steady;
  summary["kinetic_energy"] = kinetic_energy(sp, fs.u);
  summary["max_divergence"] = max_div;
  summary["max_normal_jump"] = max_jump;
  write_text(out_dir + "/summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_check_command() {
  // built-in smoke problem: lid-driven Stokes box; verifies the divergence
  // properties and condensed/monolithic agreement
  Mesh mesh = structured_rectangle(0, 0, 1, 1, 4, 4, all_dirichlet_box(0, 0, 1, 1),
                                   SplitPattern::crossed);
  SpaceOptions so;
  so.k_flow = 2;
  SpaceLayout sp(mesh, so);
  FlowState fs = FlowState::zero(sp);
  sp.set_flow_dirichlet(fs.trace,
                        [](const Vec2& x, double) {
                          const double s = x.y() > 0.999 ? 1.0 : 0.0;
                          return Vec2(s * 16 * x.x() * x.x() * (1 - x.x()) * (1 - x.x()), 0);
                        },
                        0.0);
  FlowOptions fo;
  fo.nu = 1.0;
  fo.advection = false;
  const SolveReport rep = solve_flow_steady(sp, fo, EddyField::zero(sp), fs);
  const auto [max_div, max_jump] = check_divergence(sp, fs.u);

  // condensed vs monolithic on the same tangent system
  BlockSystem bs(sp.n_cells(), 2 * sp.nv() + sp.np(), sp.n_flow_trace_solved());
  const VectorXd zr = VectorXd::Zero(sp.n_velocity_dofs());
  FlowOptions fo2 = fo;
  fo2.w_val = 1.0;
  assemble_flow(sp, fo2, EddyField::zero(sp), zr, zr, VectorXd::Zero(sp.n_pressure_dofs()),
                fs.trace, 0.0, bs);
  const VectorXd dt_c = bs.solve_condensed();
  const auto [di_m, dt_m] = bs.solve_monolithic();
  const double agree = (dt_c - dt_m).norm() / std::max(1.0, dt_m.norm());

  const bool ok = rep.converged && max_div < 1e-10 && max_jump < 1e-10 && agree < 1e-10;
  std::cout << "stokes solve converged:          " << (rep.converged ? "yes" : "no") << "\n"
            << "max cell divergence:             " << max_div << "\n"
            << "max facet normal jump:           " << max_jump << "\n"
            << "condensed vs monolithic (rel):   " << agree << "\n"
            << (ok ? "check passed" : "check FAILED") << "\n";
  return ok ? 0 : 3;
}

int run_condense_bench(Config& cfg) {
  const int n = cfg.get_int("bench.n", 16);
  const int k = cfg.get_int("bench.k", 3);
  cfg.finalize();
  if (!cfg.ok()) {
    std::cerr << cfg.error_report();
    return 2;
  }
  Mesh mesh = structured_rectangle(0, 0, 1, 1, n, n, all_dirichlet_box(0, 0, 1, 1),
                                   SplitPattern::crossed);
  SpaceOptions so;
  so.k_flow = k;
  SpaceLayout sp(mesh, so);
  const int ni = 2 * sp.nv() + sp.np();
  const VectorXd zu = VectorXd::Zero(sp.n_velocity_dofs());
  const VectorXd zp = VectorXd::Zero(sp.n_pressure_dofs());
  const VectorXd ztr = VectorXd::Zero(sp.n_flow_trace_full());
  FlowOptions fo;
  fo.nu = 1.0;
  fo.advection = false;
  fo.w_val = 1.0;

  using clock = std::chrono::steady_clock;
  BlockSystem bs(sp.n_cells(), ni, sp.n_flow_trace_solved());
  const auto t0 = clock::now();
  assemble_flow(sp, fo, EddyField::zero(sp), zu, zu, zp, ztr, 0.0, bs);
  const auto t1 = clock::now();
  bs.solve_condensed();
  const auto t2 = clock::now();
  bs.solve_monolithic();
  const auto t3 = clock::now();

  const auto ms = [](auto a, auto b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  std::cout << "cells:                " << sp.n_cells() << "\n"
            << "interior dofs:        " << ni * sp.n_cells() << "\n"
            << "trace dofs (solved):  " << sp.n_flow_trace_solved() << "\n"
            << "schur nonzeros:       " << bs.schur_nonzeros() << "\n"
            << "assembly:             " << ms(t0, t1) << " ms\n"
            << "condensed solve:      " << ms(t1, t2) << " ms\n"
            << "monolithic solve:     " << ms(t2, t3) << " ms\n";
  return 0;
}

} // namespace hdg
