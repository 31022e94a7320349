// Command-line front end: `coex analytic|simulate|validate`.

#include <string>

#include "CLI11.hpp"

#include "coex/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Unlicensed-band coexistence toolkit: closed-form channel-"
                 "access model, event simulator, and cross-validation"};
    app.require_subcommand(1);

    coex::CliOptions opt;
    std::string q_grid;
    double tolerance = 0.0;
    std::uint64_t seed = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path,
                        "Config file (KEY = VALUE lines, # comments)");
        sub->add_option("--set", opt.sets,
                        "Override one KEY=VALUE (repeatable)");
    };

    CLI::App* analytic =
        app.add_subcommand("analytic", "Sweep the closed-form model over q");
    add_common(analytic);
    analytic->add_option("--out", opt.out_path, "Output CSV path")->required();
    CLI::Option* grid_opt = analytic->add_option(
        "--q-grid", q_grid, "Arrival-probability grid START:STOP:STEP");

    CLI::App* simulate =
        app.add_subcommand("simulate", "Run the event simulator once");
    add_common(simulate);
    simulate->add_option("--out", opt.out_path, "Output CSV path")->required();
    CLI::Option* seed_opt =
        simulate->add_option("--seed", seed, "Master RNG seed");

    CLI::App* validate = app.add_subcommand(
        "validate", "Contention Monte Carlo vs the fixed point");
    add_common(validate);
    CLI::Option* vseed_opt =
        validate->add_option("--seed", seed, "Master RNG seed");
    CLI::Option* tol_opt = validate->add_option(
        "--tolerance", tolerance, "Maximum per-class relative error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (grid_opt->count() > 0) opt.q_grid = q_grid;
    if (seed_opt->count() > 0 || vseed_opt->count() > 0) opt.seed = seed;
    if (tol_opt->count() > 0) opt.tolerance = tolerance;

    if (analytic->parsed()) return coex::cmd_analytic(opt);
    if (simulate->parsed()) return coex::cmd_simulate(opt);
    return coex::cmd_validate(opt);
}
