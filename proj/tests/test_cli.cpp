#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coex/cli.hpp"
#include "json.hpp"

using namespace coex;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content = "")
        : path("/tmp/coex_test_" + name) {
        if (!content.empty()) {
            std::ofstream out(path);
            out << content;
        }
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("grid expressions parse inclusively") {
    std::vector<double> g = parse_grid("0.1:0.3:0.1");
    REQUIRE(g.size() == 3);
    CHECK(g[0] == doctest::Approx(0.1));
    CHECK(g[2] == doctest::Approx(0.3));
    CHECK(parse_grid("0.05:1.0:0.05").size() == 20);
    CHECK(parse_grid("1:1:1").size() == 1);
    CHECK_THROWS_AS(parse_grid("a:b:c"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("0.5:0.1:0.1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("0.1:0.5:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("0.1:0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
}

TEST_CASE("settings fan out to every component that shares the key") {
    AppConfig cfg;
    CHECK(cfg.model.n_wifi == 5);  // out-of-the-box reference population
    CHECK(cfg.scenario.n_enb == 5);
    CHECK(cfg.mc.n_cat4 == 5);
    CHECK(cfg.q_grid.size() == 20);

    apply_setting(cfg, "q", "0.3");
    CHECK(cfg.model.q == 0.3);
    apply_setting(cfg, "n_wifi", "7");
    CHECK(cfg.model.n_wifi == 7);
    CHECK(cfg.scenario.n_wifi_ap == 7);
    CHECK(cfg.mc.n_wifi == 7);
    apply_setting(cfg, "w0", "32");
    CHECK(cfg.model.w0 == 32);
    CHECK(cfg.scenario.w0 == 32);
    CHECK(cfg.mc.w0 == 32);
    apply_setting(cfg, "uplink_mode", "GUL");
    CHECK(cfg.model.uplink_mode == UplinkMode::GUL);
    CHECK(cfg.scenario.uplink_mode == UplinkMode::GUL);
    apply_setting(cfg, "sensing", "IDEAL");
    CHECK(cfg.scenario.sensing == SensingModel::IDEAL);
    CHECK(cfg.mc.sensing == SensingModel::IDEAL);
    CHECK(cfg.model.ideal_detection);
    apply_setting(cfg, "seed", "99");
    CHECK(cfg.scenario.seed == 99);
    CHECK(cfg.mc.seed == 99);
    apply_setting_expr(cfg, "mcot_ms=8");
    CHECK(cfg.scenario.mcot_ms == 8.0);

    CHECK_THROWS_AS(apply_setting(cfg, "nonsense", "1"),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_setting(cfg, "q", "abc"), std::invalid_argument);
    CHECK_THROWS_AS(apply_setting(cfg, "uplink_mode", "BOTH"),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_setting_expr(cfg, "no_equals_sign"),
                    std::invalid_argument);
    try {
        apply_setting(cfg, "nonsense", "1");
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
    }
}

TEST_CASE("config files accept comments, spacing, and report bad lines") {
    TempFile good("good.cfg",
                  "# scenario\n"
                  "q = 0.4\n"
                  "\n"
                  "n_enb=3   # trailing comment\n"
                  "sim_duration_s = 2.5\n");
    AppConfig cfg = load_config_file(good.path);
    CHECK(cfg.model.q == 0.4);
    CHECK(cfg.model.n_enb == 3);
    CHECK(cfg.scenario.n_enb == 3);
    CHECK(cfg.scenario.sim_duration_s == 2.5);

    TempFile bad("bad.cfg", "q = 0.4\nthis line has no equals\n");
    try {
        load_config_file(bad.path);
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config_file("/tmp/definitely_missing_coex.cfg"),
                    std::invalid_argument);
}

TEST_CASE("numeric formatting and summary paths") {
    CHECK(format_sig9(0.123456789123) == "0.123456789");
    CHECK(format_sig9(1.0) == "1");
    CHECK(format_sig9(0.05) == "0.05");
    CHECK(format_sig9(-2.5e-07) == "-2.5e-07");
    CHECK(json_summary_path("/a/b.csv") == "/a/b.json");
    CHECK(json_summary_path("x.dat") == "x.dat.json");
}

TEST_CASE("option layering: file, then sets, then dedicated flags") {
    TempFile f("layer.cfg", "q = 0.4\nseed = 5\n");
    CliOptions opt;
    opt.config_path = f.path;
    opt.sets = {"q=0.6"};
    opt.seed = 123;
    opt.q_grid = std::string("0.2:0.4:0.1");
    opt.tolerance = 0.1;
    AppConfig cfg = build_app_config(opt);
    CHECK(cfg.model.q == 0.6);          // --set overrides the file
    CHECK(cfg.scenario.seed == 123);    // --seed overrides both
    CHECK(cfg.mc.seed == 123);
    CHECK(cfg.q_grid.size() == 3);
    CHECK(cfg.tolerance == 0.1);
}

TEST_CASE("analytic command writes the sweep and reports convergence") {
    TempFile out("sweep.csv");
    CliOptions opt;
    opt.out_path = out.path;
    CHECK(cmd_analytic(opt) == 0);
    std::vector<std::string> lines = lines_of(slurp(out.path));
    REQUIRE(lines.size() == 21);
    CHECK(lines[0] ==
          "q,p_tx_wifi,p_tx_cat4,access_sul,access_gul,p_b,converged");
    CHECK(lines[1].substr(0, 5) == "0.05,");
    for (size_t i = 1; i < lines.size(); ++i)
        CHECK(lines[i].substr(lines[i].size() - 2) == ",1");

    // Ideal sensing at this population has no fixed point: honest exit 1.
    TempFile bad("sweep_bad.csv");
    CliOptions divergent;
    divergent.out_path = bad.path;
    divergent.sets = {"ideal_detection=true", "q_grid=1:1:1"};
    CHECK(cmd_analytic(divergent) == 1);
    std::vector<std::string> rows = lines_of(slurp(bad.path));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].substr(rows[1].size() - 2) == ",0");

    CliOptions no_out;
    CHECK(cmd_analytic(no_out) == 2);
    CliOptions bad_key;
    bad_key.out_path = out.path;
    bad_key.sets = {"nonsense=1"};
    CHECK(cmd_analytic(bad_key) == 2);
}

TEST_CASE("simulate command writes matching CSV and JSON summaries") {
    TempFile out1("sim1.csv");
    TempFile out2("sim2.csv");
    CliOptions opt;
    opt.out_path = out1.path;
    opt.sets = {"sim_duration_s=0.5", "sensing=IDEAL"};
    opt.seed = 9;
    REQUIRE(cmd_simulate(opt) == 0);
    std::vector<std::string> lines = lines_of(slurp(out1.path));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] ==
          "class,direction,mean_upt_mbps,files_completed,access_attempts,"
          "access_successes,collisions,wasted_grants");
    CHECK(lines[1].substr(0, 8) == "wifi,dl,");
    CHECK(lines[2].substr(0, 8) == "wifi,ul,");
    CHECK(lines[3].substr(0, 6) == "mf,dl,");
    CHECK(lines[4].substr(0, 6) == "mf,ul,");

    const std::string jpath = json_summary_path(out1.path);
    nlohmann::json j = nlohmann::json::parse(slurp(jpath));
    CHECK(j["config"]["seed"] == 9);
    CHECK(j["config"]["sim_duration_s"] == 0.5);
    CHECK(j["metrics"].contains("files_arrived"));
    CHECK(j["metrics"].contains("airtime_ticks"));
    std::remove(jpath.c_str());

    // Byte-identical replay with the same configuration and seed.
    CliOptions opt2 = opt;
    opt2.out_path = out2.path;
    REQUIRE(cmd_simulate(opt2) == 0);
    CHECK(slurp(out1.path) == slurp(out2.path));
    std::remove(json_summary_path(out2.path).c_str());

    CliOptions no_out;
    CHECK(cmd_simulate(no_out) == 2);
}

TEST_CASE("validate command compares the contention Monte Carlo to the "
          "closed form") {
    // A WiFi-only population tracks its chain closely (small-network
    // decoupling error of a few percent).
    CliOptions wifi_only;
    wifi_only.sets = {"n_cat4=0", "sensing=IDEAL", "mc_slots=300000"};
    wifi_only.tolerance = 0.05;
    CHECK(cmd_validate(wifi_only) == 0);

    // The exponential-backoff machine attempts far less often than this
    // chain's fixed point: an honest mismatch.
    CliOptions cat4_only;
    cat4_only.sets = {"n_wifi=0", "n_cat4=2", "sensing=IDEAL",
                      "mc_slots=300000"};
    cat4_only.tolerance = 0.02;
    CHECK(cmd_validate(cat4_only) == 1);

    // Mixed ideal-sensing population: the fixed point does not exist.
    CliOptions divergent;
    divergent.sets = {"sensing=IDEAL"};
    CHECK(cmd_validate(divergent) == 1);

    CliOptions bad;
    bad.sets = {"tolerance=not_a_number"};
    CHECK(cmd_validate(bad) == 2);
}
