#include "hdg/driver.hpp"

#include <CLI11.hpp>

#include <Eigen/Core>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"hdgrans: divergence-conforming HDG solver for incompressible RANS"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  int threads = 1;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "Eigen thread count");

  auto* mms = app.add_subcommand("mms", "manufactured-solution convergence study");
  auto* run = app.add_subcommand("run", "transient solve driven by a config file");
  auto* check = app.add_subcommand("check", "built-in smoke checks");
  auto* bench = app.add_subcommand("condense-bench", "static condensation benchmark");
  for (auto* sub : {mms, run, check, bench}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  Eigen::setNbThreads(threads);

  try {
    hdg::Config cfg = config_path.empty() ? hdg::Config::from_string("")
                                          : hdg::Config::load(config_path);
    if (mms->parsed()) return hdg::run_mms_command(cfg, out_dir);
    if (run->parsed()) return hdg::run_transient_command(cfg, out_dir);
    if (check->parsed()) return hdg::run_check_command();
    if (bench->parsed()) return hdg::run_condense_bench(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
