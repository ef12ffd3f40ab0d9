#pragma once

#include <filesystem>
#include <iosfwd>

#include "enscade/config.hpp"

namespace enscade {

// Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 suite failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitSuite = 3;

/// Run the solver, write snapshots plus manifest into config.out_dir.
int cmd_simulate(const RunConfig& config, std::ostream& log);

/// Evaluate the cascade report for a stored trajectory; writes report.json and
/// report.csv (bytes are a pure function of the inputs).
int cmd_analyze(const RunConfig& config, const std::filesystem::path& manifest_path,
                std::ostream& log);

/// Property suites (cutoff certificates, partition refinement, average
/// sandwich, refinement invariance, budget identity, determinism) with
/// machine-readable results; nonzero exit on any failure.
int cmd_verify(const RunConfig& config, std::ostream& log);

}  // namespace enscade
