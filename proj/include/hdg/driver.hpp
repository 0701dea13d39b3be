#pragma once

#include "hdg/config.hpp"

#include <string>

namespace hdg {

/// Config-driven entry points behind the CLI subcommands.
/// Exit codes: 0 success, 2 configuration error, 3 solver failure.
int run_mms_command(Config& cfg, const std::string& out_dir);
int run_transient_command(Config& cfg, const std::string& out_dir);
int run_check_command();
int run_condense_bench(Config& cfg);

} // namespace hdg
