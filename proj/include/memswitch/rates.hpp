#pragma once

// Boltzmann switching-rate model and the equilibrium analysis built on it.
//
// Orientation: an "up" event moves a switch from the low- to the
// high-resistance state (n -> n - 1, resistance rises); a "down" event does
// the reverse. Positive bias and positive V_off favour up events, so the
// equilibrium count n_eq = N / (exp((V q + E_off) / (k_B T (1 + rho))) + 1)
// falls as V grows.

#include <cstdint>

#include "memswitch/core.hpp"

namespace memswitch {

/// Per-switch rates, 1/s.
struct BaseRates {
    double up = 0.0;
    double down = 0.0;
};

/// Natural logarithms of the per-switch rates.
struct LogBaseRates {
    double up = 0.0;
    double down = 0.0;
};

struct RatePair {
    double up_base = 0.0;
    double down_base = 0.0;
    double up = 0.0;    // n * up_base
    double down = 0.0;  // (N - n) * down_base
};

/// ln(lambda'_up) = -(E_a - V q/2 - E_off/2) / (k_B T (1 + rho)), and the
/// mirrored expression with both offsets added for lambda'_down.
/// Throws DomainError unless T > 0 and 1 + rho > 0.
[[nodiscard]] LogBaseRates log_base_rates(double voltage, double temperature, double rho,
                                          const DeviceParams& params);

[[nodiscard]] BaseRates base_rates(double voltage, double temperature, double rho,
                                   const DeviceParams& params);

[[nodiscard]] RatePair cumulative_rates(std::int64_t n, BaseRates base, const DeviceParams& params);

/// Real-valued switch count at which up and down cumulative rates balance.
[[nodiscard]] double equilibrium_n(double voltage, double temperature, double rho,
                                   const DeviceParams& params);

/// Offset voltage that places the zero-bias equilibrium at n_eq.
/// Throws DomainError unless 0 < n_eq < N.
[[nodiscard]] double v_off_from_equilibrium(double n_eq, double temperature,
                                            const DeviceParams& params);

/// Activation voltage for which the zero-bias mean drift at n = n_thresh is
/// exactly -drift switches per interval under the constant-rate assumption:
///
///   V_a = V_T ln(2 dT n_thresh sinh(V_off / (2 V_T)) / drift)
///
/// Throws FitInfeasible if the logarithm's argument is not positive.
[[nodiscard]] double fit_va_constant_rate(double drift, double interval, double temperature,
                                          const DeviceParams& params);

struct SinhIdentity {
    double lhs = 0.0;  // lambda'_up - lambda'_down
    double rhs = 0.0;  // 2 exp(-E_a / k_B T) sinh(V q / 2 k_B T)
};

/// Both sides of the net-rate identity, evaluated with E_off = 0 and rho = 0.
[[nodiscard]] SinhIdentity net_rate_sinh_identity(double voltage, double temperature,
                                                  const DeviceParams& params);

}  // namespace memswitch
