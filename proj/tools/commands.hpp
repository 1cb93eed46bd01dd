#pragma once

#include "run_config.hpp"

namespace tdmass::cli {

/// Writes rho_omega_<label>.csv (tau,rho,omega,theta) and ermakov_<label>.csv
/// for every profile.
int cmd_ermakov(const RunConfig& cfg);

/// Writes evolution_<label>.csv for every profile and one summary.json.
int cmd_evolve(const RunConfig& cfg);

/// Writes verify_report.json; returns 0 iff every check passes.
int cmd_verify(const RunConfig& cfg);

}  // namespace tdmass::cli
