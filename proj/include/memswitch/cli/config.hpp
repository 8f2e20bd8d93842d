#pragma once

// Run configuration for the command-line tool: a flat sectioned key/value
// file, `--set section.key=value` overrides and the validated RunConfig they
// produce.
//
//   # comment
//   [device]
//   tau_th = 1.5e-9
//   [signal]
//   kind = piecewise
//   breakpoints = 0, 10, 20
//   amplitudes = 0.1, 0
//
// Sections: device, sim, signal, run, fit, equilibrium. Unknown sections or
// keys, repeated keys and unparsable values are ConfigErrors anchored to
// "<origin>:<line>".

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memswitch/core.hpp"
#include "memswitch/dynamics.hpp"
#include "memswitch/engine.hpp"
#include "memswitch/fit.hpp"

namespace memswitch::cli {

enum class SignalSource { constant, piecewise, generated };

struct SignalConfig {
    SignalSource source = SignalSource::constant;
    double voltage = 0.0;
    std::vector<double> breakpoints;
    std::vector<double> amplitudes;
    SignalSpec spec;
};

struct RunSettings {
    std::uint64_t seed = 0;
    std::size_t runs = 1;
    unsigned threads = 0;
    /// Ensemble grid and per-run sampling period; 0 selects duration / 100.
    double grid_period = 0.0;
    std::optional<std::string> preset;
    /// Write one CSV per run in the experiment command.
    bool per_run_files = true;
};

struct FitConfig {
    double interval = 1e4;
    IngestOptions ingest;
    LinearFitOptions fit;
    /// Snap resistances to the quantisation grid before pairing.
    bool quantise = true;
};

struct EquilibriumConfig {
    double voltage = 0.0;
    /// Defaults to the device bath temperature.
    std::optional<double> temperature;
    std::vector<double> rho{0.0};
};

struct RunConfig {
    DeviceParams device;
    SimConfig sim;
    /// False until sim.duration is assigned; the duration then follows the signal.
    bool duration_set = false;
    SignalConfig signal;
    RunSettings run;
    FitConfig fit;
    EquilibriumConfig equilibrium;

    /// Drive signal; a constant signal spans sim.duration.
    [[nodiscard]] PiecewiseSignal make_signal() const;
    /// Derive sim.duration from generated or piecewise signals unless set.
    void finalise();
    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

/// One `section.key = value` line, or a --set override.
struct Assignment {
    std::string key;
    std::string value;
    std::string origin;
    std::size_t line = 0;

    [[nodiscard]] std::string where() const;
};

/// Syntax pass only; values are checked by apply().
[[nodiscard]] std::vector<Assignment> parse_config(std::istream& in, const std::string& origin);
[[nodiscard]] std::vector<Assignment> read_config_file(const std::filesystem::path& path);
/// Parses `section.key=value`.
[[nodiscard]] Assignment parse_override(std::string_view text);

/// Applies assignments in order; later ones win.
void apply(RunConfig& config, const std::vector<Assignment>& assignments);

/// apply + finalise + validate. Validation failures are anchored to the
/// assignment that last set the offending field, when there is one.
void apply_and_validate(RunConfig& config, const std::vector<Assignment>& assignments);

/// Every accepted `section.key`, in table order.
[[nodiscard]] std::vector<std::string> known_keys();

}  // namespace memswitch::cli
