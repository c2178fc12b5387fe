#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tempo/cli.hpp"
#include "tempo/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tempo - parallel-in-time solver with truncated local coarse grids"};
    app.require_subcommand(1);

    std::string config_path;
    tempo::cli::CommandOptions opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--out", opt.out_path, "output CSV path (overrides output.path)");
        cmd->add_option("--workers", opt.workers_override,
                        "simulated rank count (overrides runtime.workers)");
    };

    CLI::App* solve = app.add_subcommand("solve", "run a solver experiment");
    CLI::App* theory = app.add_subcommand("theory", "evaluate convergence bounds");
    CLI::App* sweep = app.add_subcommand("sweep-k", "iterations over (m, k) combinations");
    CLI::App* propagator = app.add_subcommand("propagator", "dump an error propagator");
    for (CLI::App* cmd : {solve, theory, sweep, propagator}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : tempo::cli::kExitConfigError;
    }

    tempo::cli::FlatConfig cfg;
    try {
        cfg = tempo::cli::FlatConfig::parse_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tempo::cli::kExitConfigError;
    }

    if (solve->parsed()) return tempo::cli::cmd_solve(cfg, opt, std::cerr);
    if (theory->parsed()) return tempo::cli::cmd_theory(cfg, opt, std::cerr);
    if (sweep->parsed()) return tempo::cli::cmd_sweep_k(cfg, opt, std::cerr);
    if (propagator->parsed()) return tempo::cli::cmd_propagator(cfg, opt, std::cerr);
    return tempo::cli::kExitConfigError;
}
