#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fohs/commands.hpp"
#include "fohs/config.hpp"
#include "fohs/error.hpp"

namespace {

struct Args {
    std::string config;
    std::string out;
    std::string grid;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void add_common(CLI::App* sub, Args& args) {
    sub->add_option("--config", args.config, "experiment description (JSON)")->required();
    sub->add_option("--out", args.out, "output directory (overrides out_dir)");
    sub->add_option("--grid", args.grid, "frequency grid wmin,wmax,N");
    sub->add_option("--seed", args.seed, "random seed (overrides seed)");
    sub->add_flag("--quiet", args.quiet, "report only through the exit code");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability certification and simulation of fractional-order switching and reset systems"};
    app.set_version_flag("--version", FOHS_VERSION);
    app.require_subcommand(1);

    Args args;
    const std::pair<const char*, fohs::Command> commands[] = {
        {"analyze-switching", fohs::Command::AnalyzeSwitching},
        {"analyze-reset", fohs::Command::AnalyzeReset},
        {"beta-sweep", fohs::Command::BetaSweep},
        {"simulate", fohs::Command::Simulate},
    };
    const char* help[] = {
        "phase sweeps and common Lyapunov search for a switched system",
        "H_beta phase check and reset certificate for one beta",
        "scan beta for SPR intervals",
        "simulate a switched or reset system",
    };
    std::optional<fohs::Command> chosen;
    CLI::App* schema = app.add_subcommand("schema", "print the JSON Schema for experiment configs");
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, help[i]);
        add_common(sub, args);
        sub->callback([&chosen, cmd = commands[i].second] { chosen = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fohs::kExitError;
    }

    if (schema->parsed()) {
        std::cout << fohs::experiment_schema().dump(2) << '\n';
        return 0;
    }

    try {
        fohs::ConfigOverrides overrides;
        if (!args.out.empty()) {
            overrides.out_dir = args.out;
        }
        if (!args.grid.empty()) {
            overrides.grid = fohs::parse_grid_spec(args.grid);
        }
        overrides.seed = args.seed;

        const auto config = fohs::load_config(args.config, overrides);
        const auto result = fohs::run_command(*chosen, config);
        if (!args.quiet) {
            std::cout << result.report.dump(2) << '\n';
        }
        return result.exit_code;
    } catch (const fohs::Error& e) {
        std::cerr << "fohs: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "fohs: " << e.what() << '\n';
    }
    return fohs::kExitError;
}
