// Scenario runner for the ion-trap simulation toolkit.
//
//   iontrap <subcommand> --config <file> [--seed N] [--out-dir DIR] [--threads N]
//
// Subcommands: trap, run, validate, spectrum, render, fit, react, rempd.

#include <CLI11.hpp>

#include <iostream>

#include "iontrap/scenario.hpp"

using namespace iontrap;

int main(int argc, char** argv) {
    CLI::App app{"cold multi-species ion ensemble simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool with_outputs = true) {
        cmd->add_option("--config", config_path, "scenario config file")->required();
        cmd->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { seed_set = true; });
        if (with_outputs) {
            cmd->add_option("--out-dir", out_dir, "output directory (default .)");
            cmd->add_option("--threads", threads, "OpenMP thread count (0 = default)");
        }
    };

    CLI::App* cmd_trap = app.add_subcommand("trap", "print trap/species parameter table");
    add_common(cmd_trap, false);
    CLI::App* cmd_run = app.add_subcommand("run", "execute the scenario schedule");
    add_common(cmd_run);
    CLI::App* cmd_validate = app.add_subcommand("validate", "check a config without running");
    add_common(cmd_validate, false);
    CLI::App* cmd_spectrum = app.add_subcommand("spectrum", "motional resonance spectrum");
    add_common(cmd_spectrum);
    CLI::App* cmd_render = app.add_subcommand("render", "synthetic CCD image");
    add_common(cmd_render);
    CLI::App* cmd_fit = app.add_subcommand("fit", "fit ion number/heating to a reference image");
    add_common(cmd_fit);
    CLI::App* cmd_react = app.add_subcommand("react", "reaction kinetics run");
    add_common(cmd_react);
    CLI::App* cmd_rempd = app.add_subcommand("rempd", "rovibrational population kinetics");
    add_common(cmd_rempd);

    CLI11_PARSE(app, argc, argv);

    try {
        const ConfigFile cfg = ConfigFile::parse_file(config_path);
        RunOptions options;
        if (seed_set) options.seed = seed;
        options.out_dir = out_dir;
        options.threads = threads;

        if (cmd_validate->parsed()) {
            const auto diags = validate_scenario(cfg);
            int errors = 0;
            for (const auto& d : diags) {
                std::cout << (d.severity == Diagnostic::Severity::error ? "error" : "warning");
                if (d.line > 0) std::cout << " (line " << d.line << ")";
                std::cout << ": " << d.message << "\n";
                if (d.severity == Diagnostic::Severity::error) ++errors;
            }
            if (diags.empty()) std::cout << "ok\n";
            return errors > 0 ? 1 : 0;
        }
        if (cmd_trap->parsed()) return run_trap_report(cfg, std::cout);
        if (cmd_run->parsed()) return run_scenario(cfg, options);
        if (cmd_spectrum->parsed()) return run_spectrum(cfg, options);
        if (cmd_render->parsed()) return run_render(cfg, options);
        if (cmd_fit->parsed()) return run_fit(cfg, options);
        if (cmd_react->parsed()) return run_react(cfg, options);
        if (cmd_rempd->parsed()) return run_rempd(cfg, options);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.message << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
