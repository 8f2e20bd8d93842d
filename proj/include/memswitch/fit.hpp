#pragma once

// Drift-dataset ingestion, pair extraction, the linear conductance drift model
// and its fit, plus the discrete-time GMSM used as a brute-force oracle.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "memswitch/core.hpp"
#include "memswitch/rng.hpp"

namespace memswitch {

/// Uniformly sampled resistance record of one device (one contiguous run of
/// valid samples).
struct DriftSeries {
    std::string device_id;
    double start_time = 0.0;
    double sample_period = 10.0;
    std::vector<double> resistances;
};

struct IngestOptions {
    /// Relative sampling jitter tolerated before a device is rejected.
    double max_jitter = 0.01;
    /// Drop samples whose ratio to the previous kept sample exceeds this
    /// factor (either direction). Disabled when empty.
    std::optional<double> max_jump_ratio = 10.0;
};

struct RejectedDevice {
    std::string device_id;
    std::string reason;
};

struct IngestResult {
    std::vector<DriftSeries> series;
    /// Rows dropped by the cleaning rules.
    std::size_t dropped_rows = 0;
    std::vector<RejectedDevice> rejected;
};

/// Parses CSV with header `device_id,t_seconds,resistance_ohm`.
///
/// Rows are grouped by device (output ordered by device id) and sorted by time.
/// Non-finite or non-positive resistances and jump outliers are dropped and
/// counted; a drop splits the device into separate contiguous series so that
/// index arithmetic on each series stays aligned with time. Segments shorter
/// than two samples are discarded. Devices whose timestamps deviate from a
/// uniform period by more than max_jitter are rejected with a diagnostic.
/// Throws ConfigError for a malformed header or unparsable row.
[[nodiscard]] IngestResult ingest_series(std::istream& source, const IngestOptions& options = {});

struct DriftPair {
    double r_initial;
    double r_final;
};

struct DriftPairSet {
    double interval = 1e4;
    std::vector<DriftPair> pairs;
};

/// Pairs from consecutive non-overlapping windows of interval / sample_period
/// samples: (R[j k], R[(j + 1) k]). Throws ConfigError when the interval is not
/// a whole multiple of the sample period.
[[nodiscard]] DriftPairSet extract_pairs(const DriftSeries& series, double interval);

/// Replace every resistance with the representative of its quantisation bin.
[[nodiscard]] DriftSeries quantise_series(const DriftSeries& series,
                                          const QuantisationScheme& scheme);

/// Resistance change after the conductance falls by drift * g_step:
/// 1 / (1 / R_init - drift g_step) - R_init.
/// Throws DriftOutOfRange if the resulting conductance is not positive.
[[nodiscard]] double predict_delta_r(double r_initial, double drift, const DeviceParams& params);

struct LinearFitOptions {
    /// Bins with fewer pairs are left out of the objective.
    std::size_t min_pairs_per_bin = 5;
    /// Absolute tolerance on the drift parameter.
    double tolerance = 1e-6;
};

struct BinMean {
    double r_value;
    double mean_delta_r;
    std::size_t count;
};

struct LinearConductanceFit {
    double a = 0.0;
    /// Mean squared error of the per-bin mean resistance change, ohm^2.
    double residual = 0.0;
    std::size_t n_pairs = 0;
    std::vector<BinMean> bins;
    /// Best objective value after each golden-section iteration.
    std::vector<double> objective_trace;
};

/// Sum over bins of (mean observed dR - predict_delta_r(bin value, a))^2.
[[nodiscard]] double linear_conductance_objective(const std::vector<BinMean>& bins, double drift,
                                                  const DeviceParams& params);

/// Per-bin mean resistance change, keyed by the quantised initial resistance.
[[nodiscard]] std::vector<BinMean> bin_mean_changes(const DriftPairSet& pairs,
                                                    const QuantisationScheme& scheme,
                                                    std::size_t min_pairs_per_bin);

/// Golden-section search for the drift a on [0, 0.5 min_bin(1/R) / g_step].
/// Throws FitInfeasible when no bin has enough pairs.
[[nodiscard]] LinearConductanceFit fit_linear_conductance(const DriftPairSet& pairs,
                                                          const DeviceParams& params,
                                                          const LinearFitOptions& options = {});

// --- GMSM oracle -------------------------------------------------------------

/// Which per-step probability removes low-resistance switches.
enum class GmsmOrientation {
    /// P_A acts on the n low-resistance switches (low -> high), P_B on the
    /// N - n others.
    standard,
    swapped,
};

struct GmsmParams {
    double alpha = 1.0;  // dt / t_c
    double beta = 1.0;   // 1/V, q / (k_B T)
    double V_A = 0.0;
    double V_B = 0.0;
    double dt = 1.0;
    double t_c = 1.0;
    GmsmOrientation orientation = GmsmOrientation::standard;

    [[nodiscard]] double p_a(double voltage) const;
    [[nodiscard]] double p_b(double voltage) const;
    void validate() const;
};

/// GMSM step probabilities matched to per-switch rates: p = 1 - exp(-lambda dt)
/// for each process, expressed through V_A / V_B at the given bias.
[[nodiscard]] GmsmParams gmsm_matching(double up_rate, double down_rate, double voltage,
                                       double temperature, double dt, double t_c);

/// One GMSM step: k_up ~ Bin(n, P_up), k_down ~ Bin(N - n, P_down),
/// n' = clamp(n - k_up + k_down, 0, N). Throws ConfigError if a probability
/// leaves [0, 1].
[[nodiscard]] std::int64_t gmsm_oracle_step(std::int64_t n, std::int64_t N, double voltage,
                                            const GmsmParams& gmsm, RngStream& rng);

}  // namespace memswitch
