#pragma once

#include <array>
#include <string>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

inline constexpr int kConfigVersion = 1;

enum class LoadKind { Constant, SubBox, Bump };

/// Load descriptor: c everywhere, c on a sub-box (0 elsewhere), or the smooth
/// radial bump c exp(1 - 1/(1 - |x - x0|^2 / r^2)) inside the ball B_r(x0).
struct LoadSpec {
    LoadKind kind = LoadKind::Constant;
    double value = 1.0;
    AxisBox box;                     // SubBox
    std::array<double, 2> center{};  // Bump
    double radius = 1.0;             // Bump
};

struct RunConfig {
    DomainSpec domain;
    int refine = 4;
    LoadSpec load;
    SolveConfig solver;  // p is overwritten per sweep entry
    std::vector<double> p_schedule{1.3, 1.2, 1.1, 1.05, 1.02};
    std::string output_dir = ".";
    bool gnuplot = false;
    std::string kernel_cache;  // directory; empty disables caching

    /// Throws ConfigError on an invalid domain, load or p entry.
    void validate() const;
};

/// INI text with a top-level `version` key and sections [domain], [load],
/// [solver], [sweep], [output]. Unknown keys are rejected.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Inverse of parse_run_config (round-trips every field).
std::string to_ini(const RunConfig& cfg);

}  // namespace fraclab
