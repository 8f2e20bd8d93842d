#pragma once

// Continuous exogenous dynamics: Joule heating, the volatility state variable,
// piecewise-constant input signals and level-crossing event extraction.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "memswitch/core.hpp"

namespace memswitch {

/// T_bath + R_th V^2 / R. Throws DomainError for R <= 0.
[[nodiscard]] double temperature_steady_state(double voltage, double resistance,
                                              const DeviceParams& params);

/// c_volatile * V.
[[nodiscard]] double volatility_steady_state(double voltage, const DeviceParams& params);

/// Exact solution of dx/dt = (steady - x) / tau over dt with steady held
/// constant. Throws DomainError for dt < 0 or tau <= 0.
[[nodiscard]] double advance_first_order(double value, double steady, double tau, double dt);

/// A first-order relaxation node whose target depends on the device voltage
/// and resistance in force over each interval.
class FirstOrderNode {
public:
    using SteadyFn = std::function<double(double voltage, double resistance)>;

    FirstOrderNode(double value, double tau, SteadyFn steady);

    [[nodiscard]] double value() const { return value_; }
    [[nodiscard]] double tau() const { return tau_; }
    [[nodiscard]] double steady(double voltage, double resistance) const {
        return steady_(voltage, resistance);
    }

    void advance(double voltage, double resistance, double dt);

private:
    double value_;
    double tau_;
    SteadyFn steady_;
};

/// Right-continuous step function on [0, duration].
///
/// breakpoints() = {0 = t_0 < t_1 < ... < t_K = duration}; amplitude i holds
/// on [t_i, t_{i+1}). The signal is zero from `duration` onwards.
class PiecewiseSignal {
public:
    PiecewiseSignal(std::vector<double> breakpoints, std::vector<double> amplitudes);

    static PiecewiseSignal constant(double voltage, double duration);

    [[nodiscard]] std::span<const double> breakpoints() const { return breakpoints_; }
    [[nodiscard]] std::span<const double> amplitudes() const { return amplitudes_; }
    [[nodiscard]] double duration() const { return breakpoints_.back(); }
    [[nodiscard]] std::size_t segments() const { return amplitudes_.size(); }

    [[nodiscard]] double value_at(double t) const;

    /// Integral of the signal over [0, duration], V s.
    [[nodiscard]] double integral() const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> amplitudes_;
};

enum class SignalKind { pulse_train_ascending, pulse_train_descending, alternating, sine, square };

[[nodiscard]] std::string_view to_string(SignalKind kind);
/// Throws ConfigError for unknown names.
[[nodiscard]] SignalKind signal_kind_from_string(std::string_view name);

/// Description of one of the standard drive signals.
///
/// Pulse trains and alternating pulses use `pulse_duration` as the per-pulse
/// period with an active width of duty_cycle * pulse_duration. Square and sine
/// signals repeat over `period` for `n_periods` periods. A pulse train has
/// round(max_amplitude / pulse_step) pulses; `pulse_step` carries the sign.
struct SignalSpec {
    SignalKind kind = SignalKind::square;
    double max_amplitude = 0.0;
    double pulse_step = 0.01;
    double pulse_duration = 1000.0;
    double duty_cycle = 0.1;
    double period = 1.0;
    std::size_t n_periods = 1;
    /// Level spacing for sine discretisation; 0 selects max_amplitude / 50.
    double crossing_step = 0.0;
    std::size_t crossing_grid = 4096;

    void validate() const;
};

[[nodiscard]] PiecewiseSignal build_signal(const SignalSpec& spec);

struct LevelCrossing {
    double t;
    double level;
};

/// Times on (0, duration] at which f reaches one of the levels f(0) + k a,
/// k in Z, in order. Each arrival at a level (including touching it at an
/// extremum) is one crossing. Extrema are located on a `grid_points` grid and
/// refined, then each monotone piece is searched by bisection to
/// 1e-9 * duration.
[[nodiscard]] std::vector<LevelCrossing> level_crossing_times(
    const std::function<double(double)>& f, double step, double duration,
    std::size_t grid_points = 4096);

/// Step reconstruction of f from its crossings: f(0) until the first crossing,
/// then the most recently reached level.
[[nodiscard]] PiecewiseSignal signal_from_crossings(double initial_value,
                                                    std::span<const LevelCrossing> crossings,
                                                    double duration);

}  // namespace memswitch
