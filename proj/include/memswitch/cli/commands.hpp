#pragma once

// Subcommands of the memswitch tool. Each returns the process exit code:
// 0 success, 1 runtime or model error, 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "memswitch/cli/config.hpp"

namespace memswitch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct CommonOptions {
    std::optional<std::filesystem::path> config;
    std::vector<std::string> overrides;  // section.key=value
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::filesystem::path out_dir = ".";
    bool json = false;
};

struct EquilibriumOptions {
    std::optional<double> voltage;
    std::optional<double> temperature;
    std::vector<double> rho;
};

struct FitOptions {
    std::filesystem::path dataset;
    std::optional<double> interval;
};

struct ResampleOptions {
    std::filesystem::path input;
    double period = 0.0;
    /// Defaults to the last time in the input.
    std::optional<double> total;
};

/// Config file, then overrides, then --seed/--runs; validated.
[[nodiscard]] RunConfig load_run_config(const CommonOptions& common, RunConfig base = {});

/// Writes trajectory.csv and summary.json (plus ensemble.json when runs > 1).
void cmd_simulate(const CommonOptions& common, std::ostream& out);
void cmd_equilibrium(const CommonOptions& common, const EquilibriumOptions& options,
                     std::ostream& out);
/// Writes experiment.json, ensemble_<variant>.json and, unless disabled,
/// <variant>/run_<k>.csv per run.
void cmd_experiment(const CommonOptions& common, std::optional<std::string> preset,
                    std::ostream& out);
/// Writes fit_report.json.
void cmd_fit(const CommonOptions& common, const FitOptions& options, std::ostream& out);
/// Writes uniform.csv. Accepts trajectory or uniform CSV input.
void cmd_resample(const CommonOptions& common, const ResampleOptions& options, std::ostream& out);

/// Full command-line entry point with exception-to-exit-code mapping.
[[nodiscard]] int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace memswitch::cli
