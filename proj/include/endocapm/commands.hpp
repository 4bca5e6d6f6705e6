#pragma once

#include "endocapm/scenario.hpp"

namespace endocapm {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Each command runs the corresponding library operation and writes the
/// result to config.output_path (atomically when it is a real file).
/// Returns kExitOk, or kExitValidation / kExitNumerical with the reason
/// printed to stderr.
int cmd_solve(const ScenarioConfig& config);
int cmd_sensitivity(const ScenarioConfig& config);
int cmd_sweep(const ScenarioConfig& config);
int cmd_limits(const ScenarioConfig& config);

/// Sweep parallelism cap from ENDO_CAPM_THREADS (0 or unset = auto).
int sweep_threads_from_env();

}  // namespace endocapm
