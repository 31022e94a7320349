#include "coex/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "coex/analytic.hpp"
#include "coex/monte_carlo.hpp"
#include "coex/sim.hpp"

namespace coex {

namespace {

int usage_error(const std::string& what) {
    std::cerr << "error: " << what << "\n";
    return 2;
}

std::int64_t files_completed(const RunMetrics& m, const std::string& cls,
                             const std::string& dir) {
    std::int64_t n = 0;
    for (const FileRecord& f : m.files) {
        if (f.completion >= 0 && f.node_class == cls && f.direction == dir) {
            ++n;
        }
    }
    return n;
}

nlohmann::json upt_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

nlohmann::json counters_json(const ClassCounters& c) {
    return {{"access_attempts", c.access_attempts},
            {"access_successes", c.access_successes},
            {"collisions", c.collisions},
            {"wasted_grants", c.wasted_grants}};
}

}  // namespace

std::string format_sig9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string json_summary_path(const std::string& csv_path) {
    const std::string suffix = ".csv";
    if (csv_path.size() > suffix.size() &&
        csv_path.compare(csv_path.size() - suffix.size(), suffix.size(),
                         suffix) == 0) {
        return csv_path.substr(0, csv_path.size() - suffix.size()) + ".json";
    }
    return csv_path + ".json";
}

AppConfig build_app_config(const CliOptions& opt) {
    AppConfig cfg;
    if (!opt.config_path.empty()) cfg = load_config_file(opt.config_path);
    for (const std::string& s : opt.sets) apply_setting_expr(cfg, s);
    if (opt.seed) {
        cfg.scenario.seed = *opt.seed;
        cfg.mc.seed = *opt.seed;
    }
    if (opt.q_grid) cfg.q_grid = parse_grid(*opt.q_grid);
    if (opt.tolerance) cfg.tolerance = *opt.tolerance;
    return cfg;
}

int cmd_analytic(const CliOptions& opt) {
    AppConfig cfg;
    try {
        cfg = build_app_config(opt);
        cfg.model.validate();
        if (opt.out_path.empty()) throw std::invalid_argument("--out is required");
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }

    std::vector<SweepRow> rows;
    try {
        rows = sweep(cfg.model, cfg.q_grid);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }

    std::ofstream out(opt.out_path);
    if (!out) return usage_error("cannot write " + opt.out_path);
    out << "q,p_tx_wifi,p_tx_cat4,access_sul,access_gul,p_b,converged\n";
    bool all_converged = true;
    for (const SweepRow& r : rows) {
        out << format_sig9(r.q) << ',' << format_sig9(r.p_tx_wifi) << ','
            << format_sig9(r.p_tx_cat4) << ',' << format_sig9(r.access_sul)
            << ',' << format_sig9(r.access_gul) << ',' << format_sig9(r.p_b)
            << ',' << (r.converged ? 1 : 0) << '\n';
        all_converged = all_converged && r.converged;
    }
    out.flush();
    if (!out) return usage_error("write failed: " + opt.out_path);
    std::cout << "analytic sweep: " << rows.size() << " rows -> "
              << opt.out_path << " (w0=" << cfg.model.w0
              << " m=" << cfg.model.m << " mu=" << cfg.model.mu
              << " tnr_db=" << cfg.model.tnr_db
              << " snr_per_tx=" << cfg.model.snr_per_tx
              << " ideal_detection=" << (cfg.model.ideal_detection ? 1 : 0)
              << ")\n";
    if (!all_converged) {
        std::cerr << "warning: at least one grid point did not converge\n";
        return 1;
    }
    return 0;
}

int cmd_simulate(const CliOptions& opt) {
    AppConfig cfg;
    try {
        cfg = build_app_config(opt);
        cfg.scenario.validate();
        if (opt.out_path.empty()) throw std::invalid_argument("--out is required");
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }

    if (cfg.scenario.sim_duration_s == 0.0) {
        std::cerr << "warning: sim_duration_s is 0; reporting empty metrics\n";
    }
    const RunMetrics m = run(cfg.scenario);

    std::ofstream out(opt.out_path);
    if (!out) return usage_error("cannot write " + opt.out_path);
    out << "class,direction,mean_upt_mbps,files_completed,access_attempts,"
           "access_successes,collisions,wasted_grants\n";
    struct Row {
        const char* cls;
        const char* dir;
        const char* rec_cls;
        const std::optional<double>* upt;
        const ClassCounters* c;
    };
    const Row table[] = {
        {"wifi", "dl", "wifi_ap", &m.mean_upt_dl_wifi, &m.wifi_ap},
        {"wifi", "ul", "wifi_ap", &m.mean_upt_ul_wifi, &m.wifi_ap},
        {"mf", "dl", "enb", &m.mean_upt_dl_mf, &m.enb},
        {"mf", "ul", "ue", &m.mean_upt_ul_mf, &m.ue},
    };
    for (const Row& r : table) {
        out << r.cls << ',' << r.dir << ','
            << (r.upt->has_value() ? format_sig9(**r.upt) : std::string())
            << ',' << files_completed(m, r.rec_cls, r.dir) << ','
            << r.c->access_attempts << ',' << r.c->access_successes << ','
            << r.c->collisions << ',' << r.c->wasted_grants << '\n';
    }
    out.flush();
    if (!out) return usage_error("write failed: " + opt.out_path);

    const ScenarioConfig& s = cfg.scenario;
    nlohmann::json j;
    j["config"] = {
        {"n_wifi_ap", s.n_wifi_ap},
        {"n_enb", s.n_enb},
        {"n_ue_per_enb", s.n_ue_per_enb},
        {"uplink_mode", s.uplink_mode == UplinkMode::SUL ? "SUL" : "GUL"},
        {"mcot_ms", s.mcot_ms},
        {"grant_processing_delay_ms", s.grant_processing_delay_ms},
        {"lambda_files_per_s", s.lambda_files_per_s},
        {"file_size_bytes", s.file_size_bytes},
        {"dl_split_pct", s.dl_split_pct},
        {"phy_rate_mbps", s.phy_rate_mbps},
        {"sensing",
         s.sensing == SensingModel::IDEAL ? "IDEAL" : "ENERGY_DETECTION"},
        {"mu", s.mu},
        {"tnr_db", s.tnr_db},
        {"snr_per_tx", s.snr_per_tx},
        {"seed", s.seed},
        {"sim_duration_s", s.sim_duration_s},
        {"slot_us", s.lbt_timing.slot_us},
        {"defer_us", s.lbt_timing.defer_us},
        {"single_interval_us", s.lbt_timing.single_interval_us},
        {"w0", s.w0},
        {"m", s.m},
    };
    j["metrics"] = {
        {"mean_upt_dl_wifi_mbps", upt_or_null(m.mean_upt_dl_wifi)},
        {"mean_upt_ul_wifi_mbps", upt_or_null(m.mean_upt_ul_wifi)},
        {"mean_upt_dl_mf_mbps", upt_or_null(m.mean_upt_dl_mf)},
        {"mean_upt_ul_mf_mbps", upt_or_null(m.mean_upt_ul_mf)},
        {"wifi_ap", counters_json(m.wifi_ap)},
        {"enb", counters_json(m.enb)},
        {"ue", counters_json(m.ue)},
        {"files_arrived", m.files.size()},
        {"bits_generated", m.bits_generated},
        {"bits_delivered", m.bits_delivered},
        {"airtime_ticks", m.airtime_ticks},
        {"horizon_ticks", m.horizon_ticks},
    };
    const std::string jpath = json_summary_path(opt.out_path);
    std::ofstream js(jpath);
    if (!js) return usage_error("cannot write " + jpath);
    js << j.dump(2) << '\n';
    js.flush();
    if (!js) return usage_error("write failed: " + jpath);
    std::cout << "simulate: " << m.files.size() << " files, seed=" << s.seed
              << " -> " << opt.out_path << ", " << jpath << "\n";
    return 0;
}

int cmd_validate(const CliOptions& opt) {
    AppConfig cfg;
    try {
        cfg = build_app_config(opt);
        if (cfg.mc.n_wifi < 0 || cfg.mc.n_cat4 < 0 ||
            cfg.mc.n_wifi + cfg.mc.n_cat4 < 1) {
            throw std::invalid_argument("need n_wifi + n_cat4 >= 1");
        }
        if (cfg.tolerance < 0.0) {
            throw std::invalid_argument("tolerance must be >= 0");
        }
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }

    ModelParams p;
    p.q = 1.0;  // the contention Monte Carlo runs saturated stations
    p.w0 = cfg.mc.w0;
    p.m = cfg.mc.m;
    p.n_wifi = cfg.mc.n_wifi;
    p.n_enb = cfg.mc.n_cat4;
    p.n_ue = 0;
    p.snr_per_tx = cfg.mc.snr_per_tx;
    p.mu = cfg.mc.mu;
    p.tnr_db = cfg.mc.tnr_db;
    p.uplink_mode = UplinkMode::SUL;
    p.ideal_detection = (cfg.mc.sensing == SensingModel::IDEAL);
    p.busy_opts = cfg.model.busy_opts;

    FixedPointSolution sol;
    MonteCarloResult mc;
    try {
        p.validate();
        sol = solve_fixed_point(p);
        if (!sol.converged) {
            std::cout << "fixed point did not converge (residual="
                      << format_sig9(sol.residual) << " after "
                      << sol.iterations << " iterations)\n";
            return 1;
        }
        mc = monte_carlo_attempt_rate(cfg.mc);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    }

    bool ok = true;
    const auto report = [&](const char* cls, const ClassRate& r,
                            double analytic) {
        if (r.nodes == 0) return;
        const double sim = r.rate();
        const double rel =
            analytic != 0.0 ? std::abs(sim - analytic) / analytic
                            : (sim == 0.0 ? 0.0 : 1.0);
        std::cout << "class=" << cls << " nodes=" << r.nodes
                  << " simulated=" << format_sig9(sim)
                  << " analytic=" << format_sig9(analytic)
                  << " rel_err=" << format_sig9(rel)
                  << " tolerance=" << format_sig9(cfg.tolerance) << "\n";
        ok = ok && rel <= cfg.tolerance;
    };
    report("wifi", mc.wifi, sol.p_tx_wifi);
    report("cat4", mc.cat4, sol.p_tx_cat4);
    std::cout << (ok ? "validate: PASS\n" : "validate: FAIL\n");
    return ok ? 0 : 1;
}

}  // namespace coex
