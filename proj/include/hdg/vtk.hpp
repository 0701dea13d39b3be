#pragma once

#include "hdg/timestepper.hpp"

#include <string>

namespace hdg {

/// Legacy ASCII VTK dump with one point per cell corner (fields are
/// discontinuous across cells). Writes velocity, pressure, divergence, and,
/// when a scalar state is given, the working viscosity and nu_t / nu.
void write_vtk(const std::string& path, const SpaceLayout& sp, const FlowState& flow,
               const ScalarState* scalar = nullptr, double nu = 1.0,
               const SAConstants& sa = {});

} // namespace hdg
