#include "coex/config.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

namespace coex {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& what) {
    throw std::invalid_argument("config: " + what);
}

double parse_double(const std::string& key, const std::string& v) {
    if (v.empty()) bad("empty value for " + key);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) bad("bad number for " + key + ": " + v);
    return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    if (v.empty()) bad("empty value for " + key);
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size()) bad("bad integer for " + key + ": " + v);
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    if (v.empty()) bad("empty value for " + key);
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size()) bad("bad integer for " + key + ": " + v);
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    bad("bad boolean for " + key + ": " + v);
}

}  // namespace

AppConfig::AppConfig() {
    q_grid = parse_grid("0.05:1.0:0.05");
    // Align the closed-form population with the scenario defaults: one
    // operator of each kind, one UE per eNB.
    model.n_wifi = scenario.n_wifi_ap;
    model.n_enb = scenario.n_enb;
    model.n_ue = scenario.n_enb * scenario.n_ue_per_enb;
    mc.n_wifi = scenario.n_wifi_ap;
    mc.n_cat4 = scenario.n_enb;
}

std::vector<double> parse_grid(const std::string& expr) {
    const auto c1 = expr.find(':');
    const auto c2 = expr.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        bad("grid must be START:STOP:STEP, got " + expr);
    }
    const double start = parse_double("grid start", expr.substr(0, c1));
    const double stop = parse_double("grid stop", expr.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_double("grid step", expr.substr(c2 + 1));
    if (!(step > 0.0)) bad("grid step must be > 0");
    if (stop < start) bad("grid stop must be >= start");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + 1e-12) break;
        grid.push_back(v);
    }
    if (grid.empty()) bad("grid is empty");
    return grid;
}

void apply_setting(AppConfig& cfg, const std::string& key,
                   const std::string& value) {
    const std::string k = trim(key);
    const std::string v = trim(value);
    if (k == "q") {
        cfg.model.q = parse_double(k, v);
    } else if (k == "w0") {
        const int x = static_cast<int>(parse_int(k, v));
        cfg.model.w0 = cfg.scenario.w0 = cfg.mc.w0 = x;
    } else if (k == "m") {
        const int x = static_cast<int>(parse_int(k, v));
        cfg.model.m = cfg.scenario.m = cfg.mc.m = x;
    } else if (k == "mu") {
        const int x = static_cast<int>(parse_int(k, v));
        cfg.model.mu = cfg.scenario.mu = cfg.mc.mu = x;
    } else if (k == "tnr_db") {
        const double x = parse_double(k, v);
        cfg.model.tnr_db = cfg.scenario.tnr_db = cfg.mc.tnr_db = x;
    } else if (k == "snr_per_tx") {
        const double x = parse_double(k, v);
        cfg.model.snr_per_tx = cfg.scenario.snr_per_tx = cfg.mc.snr_per_tx = x;
    } else if (k == "n_wifi") {
        const int x = static_cast<int>(parse_int(k, v));
        cfg.model.n_wifi = cfg.scenario.n_wifi_ap = cfg.mc.n_wifi = x;
    } else if (k == "n_enb") {
        const int x = static_cast<int>(parse_int(k, v));
        cfg.model.n_enb = cfg.scenario.n_enb = x;
    } else if (k == "n_ue") {
        cfg.model.n_ue = static_cast<int>(parse_int(k, v));
    } else if (k == "n_ue_per_enb") {
        cfg.scenario.n_ue_per_enb = static_cast<int>(parse_int(k, v));
    } else if (k == "n_cat4") {
        cfg.mc.n_cat4 = static_cast<int>(parse_int(k, v));
    } else if (k == "uplink_mode") {
        if (v == "SUL") {
            cfg.model.uplink_mode = cfg.scenario.uplink_mode = UplinkMode::SUL;
        } else if (v == "GUL") {
            cfg.model.uplink_mode = cfg.scenario.uplink_mode = UplinkMode::GUL;
        } else {
            bad("uplink_mode must be SUL or GUL, got " + v);
        }
    } else if (k == "sensing") {
        if (v == "IDEAL") {
            cfg.scenario.sensing = cfg.mc.sensing = SensingModel::IDEAL;
            cfg.model.ideal_detection = true;
        } else if (v == "ENERGY_DETECTION") {
            cfg.scenario.sensing = cfg.mc.sensing =
                SensingModel::ENERGY_DETECTION;
            cfg.model.ideal_detection = false;
        } else {
            bad("sensing must be IDEAL or ENERGY_DETECTION, got " + v);
        }
    } else if (k == "ideal_detection") {
        cfg.model.ideal_detection = parse_bool(k, v);
    } else if (k == "literal_binom") {
        cfg.model.busy_opts.literal_binom = parse_bool(k, v);
    } else if (k == "include_false_alarm") {
        cfg.model.busy_opts.include_false_alarm = parse_bool(k, v);
    } else if (k == "mcot_ms") {
        cfg.scenario.mcot_ms = parse_double(k, v);
    } else if (k == "grant_processing_delay_ms") {
        cfg.scenario.grant_processing_delay_ms = parse_double(k, v);
    } else if (k == "lambda_files_per_s") {
        cfg.scenario.lambda_files_per_s = parse_double(k, v);
    } else if (k == "file_size_bytes") {
        cfg.scenario.file_size_bytes = parse_int(k, v);
    } else if (k == "dl_split_pct") {
        cfg.scenario.dl_split_pct = static_cast<int>(parse_int(k, v));
    } else if (k == "phy_rate_mbps") {
        cfg.scenario.phy_rate_mbps = parse_double(k, v);
    } else if (k == "sim_duration_s") {
        cfg.scenario.sim_duration_s = parse_double(k, v);
    } else if (k == "seed") {
        const std::uint64_t x = parse_u64(k, v);
        cfg.scenario.seed = cfg.mc.seed = x;
    } else if (k == "slot_us") {
        cfg.scenario.lbt_timing.slot_us = parse_double(k, v);
    } else if (k == "defer_us") {
        cfg.scenario.lbt_timing.defer_us = parse_double(k, v);
    } else if (k == "single_interval_us") {
        cfg.scenario.lbt_timing.single_interval_us = parse_double(k, v);
    } else if (k == "mc_slots") {
        cfg.mc.slots = parse_int(k, v);
    } else if (k == "q_grid") {
        cfg.q_grid = parse_grid(v);
    } else if (k == "tolerance") {
        cfg.tolerance = parse_double(k, v);
    } else {
        bad("unknown key: " + k);
    }
}

void apply_setting_expr(AppConfig& cfg, const std::string& expr) {
    const auto eq = expr.find('=');
    if (eq == std::string::npos) bad("setting must be KEY=VALUE, got " + expr);
    apply_setting(cfg, expr.substr(0, eq), expr.substr(eq + 1));
}

AppConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open " + path);
    AppConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bad(path + ":" + std::to_string(line_no) + ": expected KEY = VALUE");
        }
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            bad(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

}  // namespace coex
