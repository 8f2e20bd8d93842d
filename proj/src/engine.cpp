#include "memswitch/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace memswitch {

double exponential_quantile(double lambda, double u) {
    if (!(lambda >= 0.0)) {
        throw DomainError("sample_exponential: lambda must be >= 0");
    }
    if (lambda == 0.0) {
        return kNever;
    }
    return -std::log1p(-u) / lambda;
}

double sample_exponential(double lambda, RngStream& rng) {
    // Always consume one variate so the stream layout is independent of rates.
    const double u = rng.uniform();
    return exponential_quantile(lambda, u);
}

namespace {

constexpr std::pair<EventKind, std::string_view> kEventNames[] = {
    {EventKind::up, "up"},
    {EventKind::down, "down"},
    {EventKind::signal, "signal"},
    {EventKind::refresh, "refresh"},
};

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kEventNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

EventKind event_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kEventNames) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("unknown event kind '" + std::string(name) + "'");
}

std::string_view to_string(RecordPolicy policy) {
    switch (policy) {
        case RecordPolicy::all_events:
            return "all_events";
        case RecordPolicy::switching_only:
            return "switching_only";
        case RecordPolicy::sampled:
            return "sampled";
    }
    return "unknown";
}

RecordPolicy record_policy_from_string(std::string_view name) {
    for (auto p : {RecordPolicy::all_events, RecordPolicy::switching_only, RecordPolicy::sampled}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    throw ConfigError("unknown record policy '" + std::string(name) +
                      "' (all_events|switching_only|sampled)");
}

std::string_view to_string(VolatilityDrive drive) {
    return drive == VolatilityDrive::power ? "power" : "voltage";
}

VolatilityDrive volatility_drive_from_string(std::string_view name) {
    if (name == "voltage") {
        return VolatilityDrive::voltage;
    }
    if (name == "power") {
        return VolatilityDrive::power;
    }
    throw ConfigError("unknown volatility drive '" + std::string(name) + "' (voltage|power)");
}

void SimConfig::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ConfigError("duration: must be > 0");
    }
    if (refresh_period && (!(*refresh_period > 0.0) || !std::isfinite(*refresh_period))) {
        throw ConfigError("refresh_period: must be > 0");
    }
    if (!(initial_resistance > 0.0) || !std::isfinite(initial_resistance)) {
        throw ConfigError("initial_resistance: must be > 0");
    }
    if (!(1.0 + initial_rho > 0.0)) {
        throw ConfigError("initial_rho: must be > -1");
    }
    if (initial_temperature && !(*initial_temperature > 0.0)) {
        throw ConfigError("initial_temperature: must be > 0");
    }
    if (!(series_resistance >= 0.0) || !std::isfinite(series_resistance)) {
        throw ConfigError("series_resistance: must be >= 0");
    }
    if (record_period && (!(*record_period > 0.0) || !std::isfinite(*record_period))) {
        throw ConfigError("record_period: must be > 0");
    }
    if (record_policy == RecordPolicy::sampled && !record_period) {
        throw ConfigError("record_period: required by the sampled record policy");
    }
}

void EventCounts::add(EventKind kind) {
    switch (kind) {
        case EventKind::up:
            ++up;
            break;
        case EventKind::down:
            ++down;
            break;
        case EventKind::signal:
            ++signal;
            break;
        case EventKind::refresh:
            ++refresh;
            break;
    }
}

void Trajectory::append(const DeviceState& state, double resistance, EventKind kind) {
    times.push_back(state.t);
    n_values.push_back(state.n);
    resistances.push_back(resistance);
    temperatures.push_back(state.temperature);
    rhos.push_back(state.rho);
    event_kinds.push_back(kind);
}

// --- Simulator ---------------------------------------------------------------

namespace {

FirstOrderNode make_temperature_node(const DeviceParams& params, const SimConfig& config) {
    const double initial = config.initial_temperature.value_or(params.T_bath);
    if (!config.joule_heating) {
        return FirstOrderNode(initial, params.tau_th, [initial](double, double) { return initial; });
    }
    return FirstOrderNode(initial, params.tau_th, [params](double v, double r) {
        return temperature_steady_state(v, r, params);
    });
}

FirstOrderNode make_volatility_node(const DeviceParams& params, const SimConfig& config) {
    const double initial = config.initial_rho;
    if (!config.volatility) {
        return FirstOrderNode(initial, params.tau_volatile,
                              [initial](double, double) { return initial; });
    }
    if (config.volatility_drive == VolatilityDrive::power) {
        const double c = params.c_volatile;
        return FirstOrderNode(initial, params.tau_volatile,
                              [c](double v, double r) { return c * v * v / r; });
    }
    return FirstOrderNode(initial, params.tau_volatile, [params](double v, double) {
        return volatility_steady_state(v, params);
    });
}

}  // namespace

Simulator::Simulator(const DeviceParams& params, const SimConfig& config,
                     const PiecewiseSignal& signal, std::uint64_t seed)
    : params_(params),
      config_(config),
      signal_(signal),
      rng_(seed),
      temperature_((params.validate(), config.validate(), make_temperature_node(params, config))),
      volatility_(make_volatility_node(params, config)) {
    state_.n = invert_readout(config_.initial_resistance, params_);
    state_.temperature = temperature_.value();
    state_.rho = volatility_.value();
    state_.t = 0.0;
}

double Simulator::device_voltage(double input, double resistance) const {
    if (config_.series_resistance > 0.0) {
        return input * resistance / (resistance + config_.series_resistance);
    }
    return input;
}

double Simulator::next_breakpoint() const {
    const auto bps = signal_.breakpoints();
    return next_breakpoint_index_ < bps.size() ? bps[next_breakpoint_index_] : kNever;
}

double Simulator::next_refresh() const {
    if (!config_.refresh_period) {
        return kNever;
    }
    return static_cast<double>(next_refresh_index_) * *config_.refresh_period;
}

void Simulator::advance_continuous(double voltage, double resistance, double dt) {
    temperature_.advance(voltage, resistance, dt);
    volatility_.advance(voltage, resistance, dt);
    state_.temperature = temperature_.value();
    state_.rho = volatility_.value();
}

EventRecord Simulator::step() {
    if (done_) {
        throw DomainError("Simulator::step called after the run finished");
    }
    const double resistance = readout(state_.n, params_);
    const double input = signal_.value_at(state_.t);
    const double voltage = device_voltage(input, resistance);
    const auto base = base_rates(voltage, state_.temperature, state_.rho, params_);
    const auto rates = cumulative_rates(state_.n, base, params_);
    if (probe_) {
        probe_({state_.t, state_.n, input, voltage, state_.temperature, state_.rho, rates});
    }

    const double t_up = state_.t + sample_exponential(rates.up, rng_);
    const double t_down = state_.t + sample_exponential(rates.down, rng_);

    // Strict comparisons give earlier candidates priority on ties.
    double t_next = next_breakpoint();
    EventKind kind = EventKind::signal;
    if (const double t_ref = next_refresh(); t_ref < t_next) {
        t_next = t_ref;
        kind = EventKind::refresh;
    }
    if (t_down < t_next) {
        t_next = t_down;
        kind = EventKind::down;
    }
    if (t_up < t_next) {
        t_next = t_up;
        kind = EventKind::up;
    }

    if (t_next > config_.duration) {
        advance_continuous(voltage, resistance, config_.duration - state_.t);
        state_.t = config_.duration;
        done_ = true;
        return {state_, resistance, EventKind::refresh, true};
    }

    advance_continuous(voltage, resistance, t_next - state_.t);
    state_.t = t_next;
    counts_.add(kind);
    switch (kind) {
        case EventKind::up:
            --state_.n;
            break;
        case EventKind::down:
            ++state_.n;
            break;
        case EventKind::signal:
        case EventKind::refresh:
            break;
    }
    // Deterministic ticks at or before the new clock are consumed together.
    const auto bps = signal_.breakpoints();
    while (next_breakpoint_index_ < bps.size() && bps[next_breakpoint_index_] <= state_.t) {
        ++next_breakpoint_index_;
    }
    while (next_refresh() <= state_.t) {
        ++next_refresh_index_;
    }
    done_ = state_.t >= config_.duration;
    return {state_, readout(state_.n, params_), kind, done_};
}

Trajectory Simulator::run() {
    Trajectory trajectory;
    trajectory.append(state_, resistance(), EventKind::signal);
    if (config_.record_policy == RecordPolicy::sampled) {
        // Grid tick k P takes the last record at or before it.
        const double period = *config_.record_period;
        std::uint64_t k = 1;
        EventRecord held{state_, resistance(), EventKind::signal, false};
        while (!done_) {
            const auto record = step();
            const double t = record.state.t;
            for (double tick = static_cast<double>(k) * period;
                 tick < t || (record.terminal && tick == t);
                 tick = static_cast<double>(++k) * period) {
                const auto& source = tick < t ? held : record;
                DeviceState s = source.state;
                s.t = tick;
                trajectory.append(s, source.resistance, EventKind::refresh);
            }
            held = record;
            if (record.terminal && trajectory.times.back() < record.state.t) {
                trajectory.append(record.state, record.resistance, record.kind);
            }
        }
        return trajectory;
    }
    const bool keep_refresh = config_.record_policy == RecordPolicy::all_events;
    while (!done_) {
        const auto record = step();
        if (record.terminal || record.kind != EventKind::refresh || keep_refresh) {
            trajectory.append(record.state, record.resistance, record.kind);
        }
    }
    return trajectory;
}

Trajectory simulate(const SimConfig& config, const DeviceParams& params,
                    const PiecewiseSignal& signal, std::uint64_t seed) {
    return Simulator(params, config, signal, seed).run();
}

// --- Resampling --------------------------------------------------------------

std::vector<double> resample_hold(std::span<const double> times, std::span<const double> values,
                                  double period, double total) {
    if (!(period > 0.0)) {
        throw DomainError("resample: T_sample must be > 0");
    }
    if (!(total >= 0.0)) {
        throw DomainError("resample: T_tot must be >= 0");
    }
    if (times.size() != values.size() || times.empty()) {
        throw DomainError("resample: need equal-length, non-empty time and value columns");
    }
    // Guard against k * period landing one ulp short of total.
    const auto count = static_cast<std::size_t>(std::floor(total / period * (1.0 + 1e-12))) + 1;
    std::vector<double> out;
    out.reserve(count);
    std::size_t j = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) * period;
        while (j + 1 < times.size() && times[j + 1] <= t) {
            ++j;
        }
        out.push_back(values[j]);
    }
    return out;
}

UniformSeries resample_uniform(const Trajectory& trajectory, double period, double total) {
    std::vector<double> n(trajectory.n_values.begin(), trajectory.n_values.end());
    UniformSeries out;
    out.period = period;
    out.n_values = resample_hold(trajectory.times, n, period, total);
    out.resistances = resample_hold(trajectory.times, trajectory.resistances, period, total);
    out.temperatures = resample_hold(trajectory.times, trajectory.temperatures, period, total);
    out.rhos = resample_hold(trajectory.times, trajectory.rhos, period, total);
    out.times.reserve(out.n_values.size());
    for (std::size_t k = 0; k < out.n_values.size(); ++k) {
        out.times.push_back(static_cast<double>(k) * period);
    }
    return out;
}

}  // namespace memswitch
