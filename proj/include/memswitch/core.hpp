#pragma once

// Device parameters, dynamic state, thresholded conductance readout and the
// resistance quantisation scheme used when working with measured data.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "memswitch/errors.hpp"

namespace memswitch {

namespace phys {
/// Boltzmann constant, J/K (SI exact).
inline constexpr double k_B = 1.380649e-23;
/// Elementary charge, C (SI exact).
inline constexpr double q = 1.602176634e-19;
}  // namespace phys

/// k_B * T / q in volts.
[[nodiscard]] double thermal_voltage(double temperature);

/// Static constants of one memristor model instance.
///
/// Energies are carried as voltage equivalents: E_a = q * V_a, E_off = q * V_off.
/// Defaults are the titanium dioxide drift model (g_step taken from the
/// quantisation choice, 1e-7 S).
struct DeviceParams {
    std::int64_t N = 20000;
    std::int64_t n_thresh = 10000;
    double g_step = 1e-7;        // S per switch above threshold
    double g_parallel = 1e-10;   // S, baseline; R_high = 1 / g_parallel
    double V_a = 0.40049;        // V
    double V_off = 0.05;         // V
    double T_bath = 300.0;       // K
    double tau_th = 3.84e-14 * 4e4;  // s, C_th * R_th
    double R_th = 4e4;           // K/W
    double c_volatile = 10.0;    // 1/V
    double tau_volatile = 10.0;  // s

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    [[nodiscard]] double r_high() const { return 1.0 / g_parallel; }

    bool operator==(const DeviceParams&) const = default;
};

/// Dynamic state of one simulation run. m = N - n is derived, never stored.
struct DeviceState {
    std::int64_t n = 0;
    double temperature = 300.0;
    double rho = 0.0;
    double t = 0.0;
};

/// Real-valued conductance G(x) = g_parallel + g_step * max(x - n_thresh, 0).
[[nodiscard]] double conductance(double n, const DeviceParams& params);

/// Resistance readout for an integer switch count, 1 / G(n).
/// Throws DomainError for n outside [0, N].
[[nodiscard]] double readout(std::int64_t n, const DeviceParams& params);

/// Switch count whose readout is nearest to R, clamped to [n_thresh, N].
/// Resistances at or above R_high map to n_thresh. Throws DomainError for R <= 0.
[[nodiscard]] std::int64_t invert_readout(double resistance, const DeviceParams& params);

/// Resistance bins over the active region [n_thresh, N].
///
/// Boundaries are stored in order of decreasing resistance (increasing n):
/// boundaries()[0] = +inf, then R(n_thresh + 0.5), ..., R(N - 0.5), then -inf.
/// Bin i holds resistances with boundaries()[i] >= R > boundaries()[i + 1]
/// and is represented by values()[i] = R(n_thresh + i).
class QuantisationScheme {
public:
    struct Bin {
        std::size_t index;
        double value;
    };

    explicit QuantisationScheme(const DeviceParams& params);

    [[nodiscard]] Bin quantise(double resistance) const;

    [[nodiscard]] std::span<const double> boundaries() const { return boundaries_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::int64_t switch_count(std::size_t index) const {
        return n_thresh_ + static_cast<std::int64_t>(index);
    }

private:
    std::int64_t n_thresh_;
    std::vector<double> boundaries_;
    std::vector<double> values_;
};

/// Throws ConfigError when n_thresh >= N (no active region to quantise).
[[nodiscard]] QuantisationScheme build_quantisation(const DeviceParams& params);

}  // namespace memswitch
