#pragma once

// Plain-text run configuration: key = value lines inside [section] blocks.
// Unknown keys are errors; cross-field consistency is validated after parse.

#include <map>
#include <string>
#include <vector>

#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"
#include "qsl/model.hpp"
#include "qsl/solver.hpp"

namespace qsl {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class InitialKind { Gaussian, PlaneWave, File };

struct InitialSpec {
    InitialKind kind = InitialKind::Gaussian;
    double amplitude = 1.0;
    double width = 1.0;   // u0 = amplitude exp(-|x|^2 / (2 width^2))
    int mode = 1;         // plane wave: u0 = amplitude exp(i k x1), k = mode pi/L
    std::string file;     // checkpoint path
};

struct RunConfig {
    ModelSpec model;
    Grid grid;
    SolverConfig solver;
    InitialSpec initial;

    std::vector<double> checkpoint_times;
    bool diagnostics_enabled = true;
    bool interaction_enabled = false;
    double interaction_eps = 0.5;  // 1D erf mollification
    double interaction_r0 = 0.0;   // 2D kernel truncation (0 = 2 dx default)

    long seed = 0;
    std::string output_dir = "out";
    std::string prefix = "run";

    double sobolev_cs = 0.0;  // 0 = closed-form default for N >= 3

    void validate() const;
};

// Parse from text; errors carry the offending line number / key name.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Build the initial field on the configured grid.
Field build_initial(const RunConfig& cfg);

// Normalized echo of a config (defaults filled), byte-stable.
std::string render_config(const RunConfig& cfg);

}  // namespace qsl
