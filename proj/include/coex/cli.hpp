#pragma once
// Command implementations behind the `coex` binary. Each returns a process
// exit code: 0 success, 1 a model/validation failure (non-convergence or
// tolerance exceeded), 2 a usage or configuration error (no output written).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coex/config.hpp"

namespace coex {

struct CliOptions {
    std::string config_path;  // empty: defaults only
    std::string out_path;     // analytic/simulate: output CSV
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> q_grid;
    std::optional<double> tolerance;
};

// q sweep of the closed-form model -> CSV. Exit 0 iff every row converged.
int cmd_analytic(const CliOptions& opt);

// One simulator run -> CSV (per class/direction) + JSON summary next to it
// (out path with a .json suffix). Exit 0 on success.
int cmd_simulate(const CliOptions& opt);

// Contention Monte Carlo vs the closed-form fixed point at saturation.
// Prints per-class relative errors; exit 0 iff all within tolerance.
int cmd_validate(const CliOptions& opt);

// Shared helpers (exposed for tests).
std::string format_sig9(double v);
std::string json_summary_path(const std::string& csv_path);
AppConfig build_app_config(const CliOptions& opt);  // throws invalid_argument

}  // namespace coex
