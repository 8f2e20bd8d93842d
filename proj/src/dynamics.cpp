#include "memswitch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace memswitch {

double temperature_steady_state(double voltage, double resistance, const DeviceParams& params) {
    if (!(resistance > 0.0)) {
        throw DomainError("temperature_steady_state: resistance must be > 0");
    }
    return params.T_bath + params.R_th * voltage * voltage / resistance;
}

double volatility_steady_state(double voltage, const DeviceParams& params) {
    return params.c_volatile * voltage;
}

double advance_first_order(double value, double steady, double tau, double dt) {
    if (!(dt >= 0.0)) {
        throw DomainError("advance_first_order: dt must be >= 0");
    }
    if (!(tau > 0.0)) {
        throw DomainError("advance_first_order: tau must be > 0");
    }
    if (dt == 0.0) {
        return value;
    }
    return steady + (value - steady) * std::exp(-dt / tau);
}

FirstOrderNode::FirstOrderNode(double value, double tau, SteadyFn steady)
    : value_(value), tau_(tau), steady_(std::move(steady)) {
    if (!(tau_ > 0.0)) {
        throw DomainError("FirstOrderNode: tau must be > 0");
    }
}

void FirstOrderNode::advance(double voltage, double resistance, double dt) {
    value_ = advance_first_order(value_, steady_(voltage, resistance), tau_, dt);
}

// --- PiecewiseSignal ---------------------------------------------------------

PiecewiseSignal::PiecewiseSignal(std::vector<double> breakpoints, std::vector<double> amplitudes)
    : breakpoints_(std::move(breakpoints)), amplitudes_(std::move(amplitudes)) {
    if (breakpoints_.size() < 2 || breakpoints_.size() != amplitudes_.size() + 1) {
        throw ConfigError("signal: need K + 1 breakpoints for K amplitudes (K >= 1)");
    }
    if (breakpoints_.front() != 0.0) {
        throw ConfigError("signal: first breakpoint must be 0");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1]) || !std::isfinite(breakpoints_[i])) {
            throw ConfigError("signal: breakpoints must be finite and strictly increasing (index " +
                              std::to_string(i) + ")");
        }
    }
    for (double a : amplitudes_) {
        if (!std::isfinite(a)) {
            throw ConfigError("signal: amplitudes must be finite");
        }
    }
}

PiecewiseSignal PiecewiseSignal::constant(double voltage, double duration) {
    return PiecewiseSignal({0.0, duration}, {voltage});
}

double PiecewiseSignal::value_at(double t) const {
    if (t < 0.0 || t >= duration()) {
        return 0.0;
    }
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return amplitudes_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double PiecewiseSignal::integral() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        sum += amplitudes_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
    }
    return sum;
}

// --- SignalSpec --------------------------------------------------------------

namespace {

constexpr std::pair<SignalKind, std::string_view> kSignalNames[] = {
    {SignalKind::pulse_train_ascending, "pulse_train_ascending"},
    {SignalKind::pulse_train_descending, "pulse_train_descending"},
    {SignalKind::alternating, "alternating"},
    {SignalKind::sine, "sine"},
    {SignalKind::square, "square"},
};

bool is_pulse_train(SignalKind kind) {
    return kind == SignalKind::pulse_train_ascending || kind == SignalKind::pulse_train_descending;
}

std::size_t pulse_count(const SignalSpec& spec) {
    if (spec.max_amplitude == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(std::llround(spec.max_amplitude / spec.pulse_step));
}

/// Accumulates segments, merging equal neighbours and skipping empty ones.
class SegmentBuilder {
public:
    void add(double start, double end, double amplitude) {
        if (!(end > start)) {
            return;
        }
        if (!amplitudes_.empty() && amplitudes_.back() == amplitude) {
            breakpoints_.back() = end;
            return;
        }
        if (breakpoints_.empty()) {
            breakpoints_.push_back(start);
        }
        breakpoints_.push_back(end);
        amplitudes_.push_back(amplitude);
    }

    PiecewiseSignal finish() && {
        return PiecewiseSignal(std::move(breakpoints_), std::move(amplitudes_));
    }

private:
    std::vector<double> breakpoints_;
    std::vector<double> amplitudes_;
};

}  // namespace

std::string_view to_string(SignalKind kind) {
    for (const auto& [k, name] : kSignalNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

SignalKind signal_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kSignalNames) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("unknown signal kind '" + std::string(name) + "'");
}

void SignalSpec::validate() const {
    if (!std::isfinite(max_amplitude)) {
        throw ConfigError("max_amplitude: must be finite");
    }
    if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) {
        throw ConfigError("duty_cycle: must lie in (0, 1]");
    }
    if (!(pulse_duration > 0.0) || !std::isfinite(pulse_duration)) {
        throw ConfigError("pulse_duration: must be > 0");
    }
    if ((kind == SignalKind::square || kind == SignalKind::sine) &&
        (!(period > 0.0) || !std::isfinite(period))) {
        throw ConfigError("period: must be > 0");
    }
    if (!is_pulse_train(kind) && n_periods == 0) {
        throw ConfigError("n_periods: must be >= 1");
    }
    if (is_pulse_train(kind) && max_amplitude != 0.0) {
        if (!(pulse_step != 0.0) || !std::isfinite(pulse_step)) {
            throw ConfigError("pulse_step: must be non-zero");
        }
        const double ratio = max_amplitude / pulse_step;
        if (ratio < 0.5) {
            throw ConfigError("pulse_step: must share the sign of max_amplitude and not exceed it");
        }
        if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
            throw ConfigError("pulse_step: max_amplitude must be an integer multiple of pulse_step");
        }
    }
    if (kind == SignalKind::sine && (crossing_step < 0.0 || crossing_grid < 3)) {
        throw ConfigError("crossing_step/crossing_grid: invalid sine discretisation");
    }
}

PiecewiseSignal build_signal(const SignalSpec& spec) {
    spec.validate();
    SegmentBuilder out;
    switch (spec.kind) {
        case SignalKind::pulse_train_ascending:
        case SignalKind::pulse_train_descending: {
            const std::size_t count = pulse_count(spec);
            const double D = spec.pulse_duration;
            if (count == 0) {
                out.add(0.0, D, 0.0);
                break;
            }
            for (std::size_t k = 0; k < count; ++k) {
                const auto kk = static_cast<double>(k);
                const double amplitude = spec.kind == SignalKind::pulse_train_ascending
                                             ? (kk + 1.0) * spec.pulse_step
                                             : spec.max_amplitude - kk * spec.pulse_step;
                out.add(kk * D, kk * D + spec.duty_cycle * D, amplitude);
                out.add(kk * D + spec.duty_cycle * D, (kk + 1.0) * D, 0.0);
            }
            break;
        }
        case SignalKind::alternating: {
            const double D = spec.pulse_duration;
            for (std::size_t k = 0; k < spec.n_periods; ++k) {
                const auto kk = static_cast<double>(k);
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                out.add(kk * D, kk * D + spec.duty_cycle * D, sign * spec.max_amplitude);
                out.add(kk * D + spec.duty_cycle * D, (kk + 1.0) * D, 0.0);
            }
            break;
        }
        case SignalKind::square: {
            const double P = spec.period;
            for (std::size_t k = 0; k < spec.n_periods; ++k) {
                const auto kk = static_cast<double>(k);
                out.add(kk * P, kk * P + spec.duty_cycle * P, spec.max_amplitude);
                out.add(kk * P + spec.duty_cycle * P, (kk + 1.0) * P, 0.0);
            }
            break;
        }
        case SignalKind::sine: {
            const double duration = spec.period * static_cast<double>(spec.n_periods);
            if (spec.max_amplitude == 0.0) {
                return PiecewiseSignal::constant(0.0, duration);
            }
            const double step =
                spec.crossing_step > 0.0 ? spec.crossing_step : std::abs(spec.max_amplitude) / 50.0;
            const double omega = 2.0 * std::numbers::pi / spec.period;
            const double A = spec.max_amplitude;
            auto f = [A, omega](double t) { return A * std::sin(omega * t); };
            const auto crossings = level_crossing_times(
                f, step, duration, spec.crossing_grid * std::max<std::size_t>(spec.n_periods, 1));
            return signal_from_crossings(0.0, crossings, duration);
        }
    }
    return std::move(out).finish();
}

// --- Level crossings ---------------------------------------------------------

std::vector<LevelCrossing> level_crossing_times(const std::function<double(double)>& f,
                                                double step, double duration,
                                                std::size_t grid_points) {
    if (!(step > 0.0)) {
        throw DomainError("level_crossing_times: step must be > 0");
    }
    if (!(duration > 0.0)) {
        throw DomainError("level_crossing_times: duration must be > 0");
    }
    grid_points = std::max<std::size_t>(grid_points, 3);

    std::vector<double> t(grid_points);
    std::vector<double> y(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        t[i] = duration * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        y[i] = f(t[i]);
    }
    t.back() = duration;

    // Split [0, duration] into monotone pieces at refined extrema.
    std::vector<double> piece_ends;
    int last_sign = 0;
    std::size_t last_change_start = 0;  // start index of the last non-zero difference
    for (std::size_t i = 1; i < grid_points; ++i) {
        const double d = y[i] - y[i - 1];
        const int sign = (d > 0.0) - (d < 0.0);
        if (sign == 0) {
            continue;
        }
        if (last_sign != 0 && sign != last_sign) {
            const double lo = t[last_change_start];
            const double hi = t[i];
            const double flip = static_cast<double>(last_sign);
            auto objective = [&f, flip](double x) { return -flip * f(x); };
            const auto [x_ext, unused] = boost::math::tools::brent_find_minima(
                objective, lo, hi, std::numeric_limits<double>::digits / 2);
            (void)unused;
            if (piece_ends.empty() || x_ext > piece_ends.back()) {
                piece_ends.push_back(x_ext);
            }
        }
        last_sign = sign;
        last_change_start = i - 1;
    }
    piece_ends.push_back(duration);

    const double f0 = y.front();
    const double eps = 1e-9 * step;
    const double t_tol = 1e-9 * duration;
    auto tolerance = [t_tol](double a, double b) { return std::abs(b - a) <= t_tol; };

    std::vector<LevelCrossing> crossings;
    double s = 0.0;
    double fs = f0;
    for (double e : piece_ends) {
        if (!(e > s)) {
            continue;
        }
        const double fe = f(e);
        double lo = s;
        if (fe > fs) {
            const auto k_lo = static_cast<long long>(std::floor((fs + eps - f0) / step)) + 1;
            const auto k_hi = static_cast<long long>(std::floor((fe + eps - f0) / step));
            for (long long k = k_lo; k <= k_hi; ++k) {
                const double level = f0 + static_cast<double>(k) * step;
                const double target = std::min(level, fe);
                auto g = [&f, target](double x) { return f(x) - target; };
                const auto [a, b] = boost::math::tools::bisect(g, lo, e, tolerance);
                (void)a;
                crossings.push_back({b, level});
                lo = b;
            }
        } else if (fe < fs) {
            const auto k_hi = static_cast<long long>(std::ceil((fs - eps - f0) / step)) - 1;
            const auto k_lo = static_cast<long long>(std::ceil((fe - eps - f0) / step));
            for (long long k = k_hi; k >= k_lo; --k) {
                const double level = f0 + static_cast<double>(k) * step;
                const double target = std::max(level, fe);
                auto g = [&f, target](double x) { return target - f(x); };
                const auto [a, b] = boost::math::tools::bisect(g, lo, e, tolerance);
                (void)a;
                crossings.push_back({b, level});
                lo = b;
            }
        }
        s = e;
        fs = fe;
    }
    return crossings;
}

PiecewiseSignal signal_from_crossings(double initial_value, std::span<const LevelCrossing> crossings,
                                      double duration) {
    std::vector<double> breakpoints{0.0};
    std::vector<double> amplitudes{initial_value};
    const double t_end = duration * (1.0 - 1e-12);
    for (const auto& c : crossings) {
        if (!(c.t > 0.0) || !(c.t < t_end)) {
            continue;
        }
        if (c.t > breakpoints.back()) {
            breakpoints.push_back(c.t);
            amplitudes.push_back(c.level);
        } else {
            amplitudes.back() = c.level;
        }
    }
    breakpoints.push_back(duration);
    return PiecewiseSignal(std::move(breakpoints), std::move(amplitudes));
}

}  // namespace memswitch
