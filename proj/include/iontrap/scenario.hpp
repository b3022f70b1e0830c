#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iontrap/config.hpp"

namespace iontrap {

struct Diagnostic {
    enum class Severity { error, warning } severity = Severity::error;
    int line = 0;
    std::string message;
};

// Parse + invariant checks without execution (Mathieu stability warnings,
// schedule ordering, species references).
std::vector<Diagnostic> validate_scenario(const ConfigFile& cfg);

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the config seed
    std::filesystem::path out_dir = ".";
    int threads = 0;  // 0 = leave the OpenMP default
};

// Executes the scenario schedule (subcommand `run`): evolves the ensemble,
// applies timed actions, writes the declared outputs plus manifest.txt.
// Returns the exit status (0 = success).
int run_scenario(const ConfigFile& cfg, const RunOptions& options);

// Other subcommands backed by the same config file.
int run_trap_report(const ConfigFile& cfg, std::ostream& out);
int run_spectrum(const ConfigFile& cfg, const RunOptions& options);
int run_render(const ConfigFile& cfg, const RunOptions& options);
int run_fit(const ConfigFile& cfg, const RunOptions& options);
int run_react(const ConfigFile& cfg, const RunOptions& options);
int run_rempd(const ConfigFile& cfg, const RunOptions& options);

}  // namespace iontrap
