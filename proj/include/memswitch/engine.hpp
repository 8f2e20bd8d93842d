#pragma once

// Event-driven simulation of N metastable switches driven by competing
// exponential up/down processes, with piecewise-constant inputs, periodic
// refresh ticks and exact first-order temperature/volatility dynamics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "memswitch/core.hpp"
#include "memswitch/dynamics.hpp"
#include "memswitch/rates.hpp"
#include "memswitch/rng.hpp"

namespace memswitch {

/// "Never fires" sentinel for waiting times.
inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Inverse-transform sample of Exp(lambda): -ln(1 - u) / lambda.
/// lambda == 0 returns kNever. Throws DomainError for lambda < 0.
[[nodiscard]] double sample_exponential(double lambda, RngStream& rng);
/// Same, for a caller-supplied uniform u in [0, 1).
[[nodiscard]] double exponential_quantile(double lambda, double u);

enum class EventKind : std::uint8_t { up, down, signal, refresh };

[[nodiscard]] std::string_view to_string(EventKind kind);
[[nodiscard]] EventKind event_kind_from_string(std::string_view name);

/// all_events keeps every record; switching_only drops refresh ticks; sampled
/// keeps only the sample-and-hold values on the record_period grid plus the
/// terminal record.
enum class RecordPolicy { all_events, switching_only, sampled };

[[nodiscard]] std::string_view to_string(RecordPolicy policy);
[[nodiscard]] RecordPolicy record_policy_from_string(std::string_view name);

/// Quantity the volatility relaxes toward, scaled by c_volatile.
enum class VolatilityDrive {
    /// c_volatile * V (c_volatile in 1/V).
    voltage,
    /// c_volatile * V^2 / R, the power dissipated in the device (c_volatile in 1/W).
    power,
};

[[nodiscard]] std::string_view to_string(VolatilityDrive drive);
[[nodiscard]] VolatilityDrive volatility_drive_from_string(std::string_view name);

struct SimConfig {
    double duration = 1e4;
    RecordPolicy record_policy = RecordPolicy::switching_only;
    /// Grid spacing for RecordPolicy::sampled.
    std::optional<double> record_period;
    std::optional<double> refresh_period;
    double initial_resistance = 1e4;
    double initial_rho = 0.0;
    /// Defaults to T_bath.
    std::optional<double> initial_temperature;
    /// Temperature relaxes toward T_bath + R_th V^2 / R; otherwise held fixed.
    bool joule_heating = false;
    /// rho relaxes toward the drive target; otherwise held at initial_rho.
    bool volatility = false;
    VolatilityDrive volatility_drive = VolatilityDrive::voltage;
    /// When > 0 the signal drives the device through this series resistor and
    /// the device sees V_in R(n) / (R(n) + R_series).
    double series_resistance = 0.0;

    void validate() const;
};

/// Non-uniform event record. Parallel arrays; entry 0 is the initial state.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::int64_t> n_values;
    std::vector<double> resistances;
    std::vector<double> temperatures;
    std::vector<double> rhos;
    std::vector<EventKind> event_kinds;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    void append(const DeviceState& state, double resistance, EventKind kind);
    bool operator==(const Trajectory&) const = default;
};

/// Events that actually fired, by kind (the synthetic end-of-run record is not
/// counted).
struct EventCounts {
    std::size_t up = 0;
    std::size_t down = 0;
    std::size_t signal = 0;
    std::size_t refresh = 0;

    void add(EventKind kind);
    [[nodiscard]] std::size_t total() const { return up + down + signal + refresh; }
};

struct EventRecord {
    DeviceState state;  // after the event
    double resistance = 0.0;
    EventKind kind = EventKind::refresh;
    bool terminal = false;
};

/// Inputs seen by one rate evaluation; handed to the optional probe.
struct RateEvaluation {
    double t;
    std::int64_t n;
    double input_voltage;
    double device_voltage;
    double temperature;
    double rho;
    RatePair rates;
};

/// One simulation run. Between events the switching rates, the device
/// voltage and the relaxation targets are constant; temperature and rho are
/// advanced exactly over each interval before rates are recomputed.
///
/// Competing candidates and their tie order: signal > refresh > down > up.
class Simulator {
public:
    using Probe = std::function<void(const RateEvaluation&)>;

    Simulator(const DeviceParams& params, const SimConfig& config, const PiecewiseSignal& signal,
              std::uint64_t seed);

    [[nodiscard]] const DeviceState& state() const { return state_; }
    [[nodiscard]] bool done() const { return done_; }
    [[nodiscard]] double resistance() const { return readout(state_.n, params_); }
    [[nodiscard]] const EventCounts& counts() const { return counts_; }

    void set_probe(Probe probe) { probe_ = std::move(probe); }

    /// Advance to the next event. Precondition: !done().
    EventRecord step();

    /// Run to completion, recording per the configured policy.
    Trajectory run();

private:
    [[nodiscard]] double device_voltage(double input, double resistance) const;
    [[nodiscard]] double next_breakpoint() const;
    [[nodiscard]] double next_refresh() const;
    void advance_continuous(double voltage, double resistance, double dt);

    DeviceParams params_;
    SimConfig config_;
    PiecewiseSignal signal_;
    RngStream rng_;
    FirstOrderNode temperature_;
    FirstOrderNode volatility_;
    DeviceState state_;
    std::size_t next_breakpoint_index_ = 1;
    std::uint64_t next_refresh_index_ = 1;
    bool done_ = false;
    EventCounts counts_;
    Probe probe_;
};

[[nodiscard]] Trajectory simulate(const SimConfig& config, const DeviceParams& params,
                                  const PiecewiseSignal& signal, std::uint64_t seed);

/// Uniformly sampled copy of a trajectory: row k is the record in force at
/// k * period (sample-and-hold).
struct UniformSeries {
    double period = 0.0;
    std::vector<double> times;
    std::vector<double> n_values;
    std::vector<double> resistances;
    std::vector<double> temperatures;
    std::vector<double> rhos;
};

/// Sample-and-hold of one column: out[k] = values[j] with j the last index
/// whose time <= k * period (values[0] before the first time). Length is
/// floor(total / period) + 1. Throws DomainError for period <= 0 or total < 0.
[[nodiscard]] std::vector<double> resample_hold(std::span<const double> times,
                                                std::span<const double> values, double period,
                                                double total);

[[nodiscard]] UniformSeries resample_uniform(const Trajectory& trajectory, double period,
                                             double total);

struct EnsembleOptions {
    std::size_t n_runs = 1;
    std::uint64_t master_seed = 0;
    /// Spacing of the shared statistics grid; 0 selects duration / 100.
    double grid_period = 0.0;
    /// Worker threads; 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
    std::vector<double> quantile_levels{0.05, 0.25, 0.5, 0.75, 0.95};
    /// Called from worker threads with each finished run; calls may overlap.
    std::function<void(std::size_t run, const Trajectory&)> on_run;
};

/// Per-run results are reduced in run order, so the statistics depend only on
/// the inputs and the master seed. Standard deviations are population values.
struct EnsembleStats {
    std::size_t n_runs = 0;
    std::vector<double> grid;
    std::vector<double> mean_n;
    std::vector<double> std_n;
    std::vector<double> mean_r;
    std::vector<double> std_r;
    std::vector<double> quantile_levels;
    /// quantiles_r[level][grid index]
    std::vector<std::vector<double>> quantiles_r;
    std::vector<double> final_n;
    std::vector<double> final_r;
    double mean_final_n = 0.0;
    double std_final_n = 0.0;
    double mean_final_r = 0.0;
    double std_final_r = 0.0;
};

[[nodiscard]] EnsembleStats run_ensemble(const SimConfig& config, const DeviceParams& params,
                                         const PiecewiseSignal& signal,
                                         const EnsembleOptions& options);

/// Linear-interpolation quantile of an unsorted sample (copied).
[[nodiscard]] double quantile(std::vector<double> sample, double level);

}  // namespace memswitch
