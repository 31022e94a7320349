#pragma once
// Flat key=value configuration shared by all CLI commands. One namespace of
// keys feeds the closed-form model, the event simulator, and the contention
// Monte Carlo; shared physical keys (w0, mu, snr_per_tx, ...) apply to every
// component at once so a single file describes one coherent scenario.

#include <string>
#include <vector>

#include "coex/analytic.hpp"
#include "coex/monte_carlo.hpp"
#include "coex/sim.hpp"

namespace coex {

struct AppConfig {
    ModelParams model{};
    ScenarioConfig scenario{};
    MonteCarloConfig mc{};
    std::vector<double> q_grid;  // defaults to 0.05..1.0 step 0.05
    double tolerance = 0.02;

    AppConfig();
};

// Applies one KEY=VALUE setting. Unknown keys and unparsable values throw
// std::invalid_argument naming the offender.
void apply_setting(AppConfig& cfg, const std::string& key,
                   const std::string& value);

// Parses "KEY=VALUE" (as given to --set).
void apply_setting_expr(AppConfig& cfg, const std::string& expr);

// Loads a config file: one KEY = VALUE per line, '#' starts a comment,
// blank lines ignored. Throws std::invalid_argument with the line number on
// any malformed line.
AppConfig load_config_file(const std::string& path);

// Parses a "START:STOP:STEP" grid expression into an increasing grid
// (inclusive of STOP up to rounding). Throws std::invalid_argument on
// malformed input or an empty grid.
std::vector<double> parse_grid(const std::string& expr);

}  // namespace coex
