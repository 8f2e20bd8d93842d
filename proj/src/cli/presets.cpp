#include "memswitch/cli/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace memswitch::cli {

namespace pv = preset_values;

namespace {

constexpr std::string_view kNames[] = {
    "hysteresis",
    "switching_negative_ascending",
    "switching_negative_descending",
    "switching_positive_ascending",
    "switching_positive_descending",
    "switching_alternating",
    "frequency_potentiation",
    "spiking",
};

void use_sampling(RunConfig& c, double period) {
    c.run.grid_period = period;
    c.sim.record_policy = RecordPolicy::sampled;
    c.sim.record_period = period;
}

std::string label_for(const char* prefix, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%s%g", prefix, value);
    return buffer;
}

}  // namespace

std::span<const std::string_view> preset_names() { return kNames; }

std::string_view to_string(Preset preset) { return kNames[static_cast<std::size_t>(preset)]; }

Preset preset_from_string(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kNames); ++i) {
        if (kNames[i] == name) {
            return static_cast<Preset>(i);
        }
    }
    std::string known;
    for (auto n : kNames) {
        known += known.empty() ? "" : ", ";
        known += n;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

RunConfig preset_config(Preset preset) {
    RunConfig c;
    c.run.preset = std::string(to_string(preset));
    switch (preset) {
        case Preset::hysteresis:
            c.signal.source = SignalSource::generated;
            c.signal.spec.kind = SignalKind::sine;
            c.signal.spec.max_amplitude = pv::kHysteresisAmplitude;
            c.signal.spec.period = pv::kHysteresisPeriod;
            c.signal.spec.n_periods = 1;
            c.sim.initial_resistance = pv::kHysteresisResistance;
            c.sim.refresh_period = pv::kRefreshPeriod;
            c.sim.joule_heating = true;
            use_sampling(c, pv::kHysteresisGrid);
            break;
        case Preset::switching_negative_ascending:
        case Preset::switching_negative_descending:
        case Preset::switching_positive_ascending:
        case Preset::switching_positive_descending:
        case Preset::switching_alternating: {
            const auto row = *std::find_if(pv::kSwitching.begin(), pv::kSwitching.end(),
                                           [&](const auto& r) { return r.preset == preset; });
            c.signal.source = SignalSource::generated;
            c.signal.spec.kind = row.kind;
            c.signal.spec.max_amplitude = row.max_amplitude;
            if (row.kind != SignalKind::alternating) {
                c.signal.spec.pulse_step = row.pulse_step;
            }
            c.signal.spec.pulse_duration = row.pulse_duration;
            c.signal.spec.duty_cycle = row.duty_cycle;
            c.signal.spec.n_periods = pv::kAlternatingPulses;
            c.sim.initial_resistance = pv::kSwitchingMinResistance;
            c.sim.refresh_period = pv::kRefreshPeriod;
            c.sim.joule_heating = true;
            use_sampling(c, pv::kSwitchingGrid);
            break;
        }
        case Preset::frequency_potentiation:
            c.device.c_volatile = pv::kFrequencyCVolatile;
            c.signal.source = SignalSource::generated;
            c.signal.spec.kind = SignalKind::square;
            c.signal.spec.max_amplitude = pv::kFrequencyAmplitude;
            c.signal.spec.n_periods = pv::kFrequencyPeriods;
            c.signal.spec.period = 1.0 / pv::kFrequencies.front();
            c.signal.spec.duty_cycle = pv::kFrequencyPulseWidth * pv::kFrequencies.front();
            c.sim.duration = pv::kFrequencyDuration;
            c.duration_set = true;
            c.sim.refresh_period = pv::kFrequencyRefresh;
            c.sim.initial_resistance = pv::kFrequencyResistance;
            c.sim.volatility = true;
            use_sampling(c, pv::kFrequencyGrid);
            break;
        case Preset::spiking:
            c.device.g_step = pv::kSpikingGStep;
            c.device.g_parallel = pv::kSpikingGParallel;
            c.device.N = pv::kSpikingN;
            c.device.n_thresh = pv::kSpikingNThresh;
            c.device.V_a = pv::kSpikingVa;
            c.device.V_off = pv::kSpikingVoff;
            c.device.c_volatile = pv::kSpikingCVolatile;
            c.signal.source = SignalSource::constant;
            c.signal.voltage = pv::kSpikingInput;
            c.sim.duration = pv::kSpikingDuration;
            c.duration_set = true;
            c.sim.series_resistance = pv::kSpikingSeriesResistance;
            c.sim.initial_resistance = pv::kSpikingResistance;
            c.sim.refresh_period = pv::kSpikingRefresh;
            c.sim.volatility = true;
            c.sim.volatility_drive = VolatilityDrive::power;
            use_sampling(c, pv::kSpikingGrid);
            break;
    }
    return c;
}

std::vector<PresetVariant> preset_variants(Preset preset, const RunConfig& base) {
    std::vector<PresetVariant> variants;
    switch (preset) {
        case Preset::switching_negative_ascending:
        case Preset::switching_negative_descending:
        case Preset::switching_positive_ascending:
        case Preset::switching_positive_descending:
        case Preset::switching_alternating:
            for (double r : log_spaced(pv::kSwitchingMinResistance, pv::kSwitchingMaxResistance,
                                       pv::kSwitchingStarts)) {
                RunConfig c = base;
                c.sim.initial_resistance = r;
                variants.push_back({label_for("R0_", std::round(r)), std::move(c)});
            }
            break;
        case Preset::frequency_potentiation:
            for (double f : pv::kFrequencies) {
                RunConfig c = base;
                c.signal.spec.period = 1.0 / f;
                c.signal.spec.duty_cycle = pv::kFrequencyPulseWidth * f;
                variants.push_back({label_for("f_", f), std::move(c)});
            }
            break;
        case Preset::hysteresis:
        case Preset::spiking:
            variants.push_back({"default", base});
            break;
    }
    for (auto& v : variants) {
        v.config.finalise();
        v.config.validate();
    }
    return variants;
}

TraceKind preset_trace(Preset preset) {
    switch (preset) {
        case Preset::hysteresis:
            return TraceKind::vi_loop;
        case Preset::spiking:
            return TraceKind::current;
        default:
            return TraceKind::state;
    }
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi >= lo) || count == 0) {
        throw DomainError("log_spaced: need 0 < lo <= hi and count >= 1");
    }
    std::vector<double> out(count);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const double w = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = std::pow(10.0, a + w * (b - a));
    }
    out.front() = lo;
    out.back() = count == 1 ? lo : hi;
    return out;
}

std::size_t count_excursions(std::span<const double> trace, double factor) {
    if (trace.size() < 2) {
        return 0;
    }
    std::vector<double> tail(trace.begin() + static_cast<long>(trace.size() / 2), trace.end());
    std::nth_element(tail.begin(), tail.begin() + static_cast<long>(tail.size() / 2), tail.end());
    const double threshold = factor * tail[tail.size() / 2];
    std::size_t count = 0;
    bool above = trace.front() > threshold;
    for (double x : trace.subspan(1)) {
        const bool now = x > threshold;
        count += (now && !above) ? 1 : 0;
        above = now;
    }
    return count;
}

}  // namespace memswitch::cli
