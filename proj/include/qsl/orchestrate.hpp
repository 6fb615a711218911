#pragma once

// Run orchestration: wires the standard observers (diagnostic records,
// checkpoints, interaction accumulators) into a solver run and writes the
// CSV/checkpoint/manifest artifacts.

#include <string>

#include "qsl/config.hpp"
#include "qsl/diagnostics.hpp"
#include "qsl/interaction.hpp"

namespace qsl {

// Exit codes shared with the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitHypothesisRejected = 4;

// Advance the configured run, collecting records and checkpoint snapshots.
// Throws DivergedError / DomainError on failure (partial trajectory returned
// via the out-parameter when provided).
Trajectory simulate(const RunConfig& cfg);

struct OrchestrateResult {
    int exit_code = kExitOk;
    std::string failed_stage;
    Trajectory trajectory;
};

// simulate + write diagnostics.csv, checkpoints, interaction.csv, scatter.csv
// and manifest.json under cfg.output_dir.
OrchestrateResult orchestrate(const RunConfig& cfg);

}  // namespace qsl
