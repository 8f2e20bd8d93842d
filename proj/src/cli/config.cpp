#include "memswitch/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <utility>

namespace memswitch::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError("expected a number, got '" + std::string(text) + "'");
    }
    if (!std::isfinite(value)) {
        throw ConfigError("expected a finite number, got '" + std::string(text) + "'");
    }
    return value;
}

template <typename Int>
Int parse_integer(std::string_view text) {
    text = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) {
        return value;
    }
    // Accept integral floating forms such as 1e6.
    double d = 0.0;
    try {
        d = parse_double(text);
    } catch (const ConfigError&) {
        throw ConfigError("expected an integer, got '" + std::string(text) + "'");
    }
    if (d != std::floor(d) || d < static_cast<double>(std::numeric_limits<Int>::min()) ||
        d > static_cast<double>(std::numeric_limits<Int>::max())) {
        throw ConfigError("expected an integer, got '" + std::string(text) + "'");
    }
    return static_cast<Int>(d);
}

bool parse_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "yes" || text == "on" || text == "1") {
        return true;
    }
    if (text == "false" || text == "no" || text == "off" || text == "0") {
        return false;
    }
    throw ConfigError("expected true/false, got '" + std::string(text) + "'");
}

bool is_none(std::string_view text) {
    text = trim(text);
    return text == "none" || text.empty();
}

std::optional<double> parse_optional_double(std::string_view text) {
    if (is_none(text)) {
        return std::nullopt;
    }
    return parse_double(text);
}

std::vector<double> parse_list(std::string_view text) {
    std::vector<double> values;
    text = trim(text);
    if (text.empty()) {
        return values;
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        values.push_back(parse_double(text.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return values;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& key_table() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"device.N", [](RunConfig& c, auto v) { c.device.N = parse_integer<std::int64_t>(v); }},
        {"device.n_thresh",
         [](RunConfig& c, auto v) { c.device.n_thresh = parse_integer<std::int64_t>(v); }},
        {"device.g_step", [](RunConfig& c, auto v) { c.device.g_step = parse_double(v); }},
        {"device.g_parallel", [](RunConfig& c, auto v) { c.device.g_parallel = parse_double(v); }},
        {"device.V_a", [](RunConfig& c, auto v) { c.device.V_a = parse_double(v); }},
        {"device.V_off", [](RunConfig& c, auto v) { c.device.V_off = parse_double(v); }},
        {"device.T_bath", [](RunConfig& c, auto v) { c.device.T_bath = parse_double(v); }},
        {"device.tau_th", [](RunConfig& c, auto v) { c.device.tau_th = parse_double(v); }},
        {"device.R_th", [](RunConfig& c, auto v) { c.device.R_th = parse_double(v); }},
        {"device.c_volatile", [](RunConfig& c, auto v) { c.device.c_volatile = parse_double(v); }},
        {"device.tau_volatile",
         [](RunConfig& c, auto v) { c.device.tau_volatile = parse_double(v); }},

        {"sim.duration",
         [](RunConfig& c, auto v) {
             c.sim.duration = parse_double(v);
             c.duration_set = true;
         }},
        {"sim.record_policy",
         [](RunConfig& c, auto v) { c.sim.record_policy = record_policy_from_string(trim(v)); }},
        {"sim.record_period",
         [](RunConfig& c, auto v) { c.sim.record_period = parse_optional_double(v); }},
        {"sim.refresh_period",
         [](RunConfig& c, auto v) { c.sim.refresh_period = parse_optional_double(v); }},
        {"sim.initial_resistance",
         [](RunConfig& c, auto v) { c.sim.initial_resistance = parse_double(v); }},
        {"sim.initial_rho", [](RunConfig& c, auto v) { c.sim.initial_rho = parse_double(v); }},
        {"sim.initial_temperature",
         [](RunConfig& c, auto v) { c.sim.initial_temperature = parse_optional_double(v); }},
        {"sim.joule_heating", [](RunConfig& c, auto v) { c.sim.joule_heating = parse_bool(v); }},
        {"sim.volatility", [](RunConfig& c, auto v) { c.sim.volatility = parse_bool(v); }},
        {"sim.volatility_drive",
         [](RunConfig& c, auto v) {
             c.sim.volatility_drive = volatility_drive_from_string(trim(v));
         }},
        {"sim.series_resistance",
         [](RunConfig& c, auto v) { c.sim.series_resistance = parse_double(v); }},

        {"signal.kind",
         [](RunConfig& c, auto v) {
             const auto name = trim(v);
             if (name == "constant") {
                 c.signal.source = SignalSource::constant;
             } else if (name == "piecewise") {
                 c.signal.source = SignalSource::piecewise;
             } else {
                 c.signal.source = SignalSource::generated;
                 c.signal.spec.kind = signal_kind_from_string(name);
             }
         }},
        {"signal.voltage", [](RunConfig& c, auto v) { c.signal.voltage = parse_double(v); }},
        {"signal.breakpoints",
         [](RunConfig& c, auto v) { c.signal.breakpoints = parse_list(v); }},
        {"signal.amplitudes", [](RunConfig& c, auto v) { c.signal.amplitudes = parse_list(v); }},
        {"signal.max_amplitude",
         [](RunConfig& c, auto v) { c.signal.spec.max_amplitude = parse_double(v); }},
        {"signal.pulse_step",
         [](RunConfig& c, auto v) { c.signal.spec.pulse_step = parse_double(v); }},
        {"signal.pulse_duration",
         [](RunConfig& c, auto v) { c.signal.spec.pulse_duration = parse_double(v); }},
        {"signal.duty_cycle",
         [](RunConfig& c, auto v) { c.signal.spec.duty_cycle = parse_double(v); }},
        {"signal.period", [](RunConfig& c, auto v) { c.signal.spec.period = parse_double(v); }},
        {"signal.n_periods",
         [](RunConfig& c, auto v) { c.signal.spec.n_periods = parse_integer<std::size_t>(v); }},
        {"signal.crossing_step",
         [](RunConfig& c, auto v) { c.signal.spec.crossing_step = parse_double(v); }},
        {"signal.crossing_grid",
         [](RunConfig& c, auto v) {
             c.signal.spec.crossing_grid = parse_integer<std::size_t>(v);
         }},

        {"run.seed", [](RunConfig& c, auto v) { c.run.seed = parse_integer<std::uint64_t>(v); }},
        {"run.runs", [](RunConfig& c, auto v) { c.run.runs = parse_integer<std::size_t>(v); }},
        {"run.threads", [](RunConfig& c, auto v) { c.run.threads = parse_integer<unsigned>(v); }},
        {"run.grid_period", [](RunConfig& c, auto v) { c.run.grid_period = parse_double(v); }},
        {"run.preset",
         [](RunConfig& c, auto v) {
             c.run.preset = is_none(v) ? std::nullopt : std::optional(std::string(trim(v)));
         }},
        {"run.per_run_files", [](RunConfig& c, auto v) { c.run.per_run_files = parse_bool(v); }},

        {"fit.interval", [](RunConfig& c, auto v) { c.fit.interval = parse_double(v); }},
        {"fit.max_jitter",
         [](RunConfig& c, auto v) { c.fit.ingest.max_jitter = parse_double(v); }},
        {"fit.max_jump_ratio",
         [](RunConfig& c, auto v) { c.fit.ingest.max_jump_ratio = parse_optional_double(v); }},
        {"fit.min_pairs_per_bin",
         [](RunConfig& c, auto v) {
             c.fit.fit.min_pairs_per_bin = parse_integer<std::size_t>(v);
         }},
        {"fit.tolerance", [](RunConfig& c, auto v) { c.fit.fit.tolerance = parse_double(v); }},
        {"fit.quantise", [](RunConfig& c, auto v) { c.fit.quantise = parse_bool(v); }},

        {"equilibrium.voltage",
         [](RunConfig& c, auto v) { c.equilibrium.voltage = parse_double(v); }},
        {"equilibrium.temperature",
         [](RunConfig& c, auto v) { c.equilibrium.temperature = parse_optional_double(v); }},
        {"equilibrium.rho", [](RunConfig& c, auto v) { c.equilibrium.rho = parse_list(v); }},
    };
    return table;
}

const Setter* find_setter(std::string_view key) {
    for (const auto& [name, setter] : key_table()) {
        if (name == key) {
            return &setter;
        }
    }
    return nullptr;
}

bool known_section(std::string_view section) {
    for (const auto& [name, setter] : key_table()) {
        if (name.substr(0, name.find('.')) == section) {
            return true;
        }
    }
    return false;
}

// Prefix a sub-validator's "field: message" with its section.
template <typename Fn>
void validate_section(const char* section, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(section) + "." + e.what());
    }
}

}  // namespace

std::string Assignment::where() const {
    return line == 0 ? origin : origin + ":" + std::to_string(line);
}

PiecewiseSignal RunConfig::make_signal() const {
    switch (signal.source) {
        case SignalSource::constant:
            return PiecewiseSignal::constant(signal.voltage, sim.duration);
        case SignalSource::piecewise:
            return PiecewiseSignal(signal.breakpoints, signal.amplitudes);
        case SignalSource::generated:
            return build_signal(signal.spec);
    }
    throw ConfigError("signal.kind: unknown signal source");
}

void RunConfig::finalise() {
    if (duration_set || signal.source == SignalSource::constant) {
        return;
    }
    if (signal.source == SignalSource::piecewise) {
        if (!signal.breakpoints.empty()) {
            sim.duration = signal.breakpoints.back();
        }
        return;
    }
    validate_section("signal", [&] { signal.spec.validate(); });
    sim.duration = build_signal(signal.spec).duration();
}

void RunConfig::validate() const {
    validate_section("device", [&] { device.validate(); });
    validate_section("sim", [&] { sim.validate(); });
    validate_section("signal", [&] {
        if (signal.source == SignalSource::piecewise) {
            try {
                (void)PiecewiseSignal(signal.breakpoints, signal.amplitudes);
            } catch (const ConfigError& e) {
                std::string what = e.what();
                throw ConfigError("breakpoints: " + what.substr(what.find(':') + 2));
            }
        } else if (signal.source == SignalSource::generated) {
            signal.spec.validate();
        }
    });
    validate_section("run", [&] {
        if (run.runs == 0) {
            throw ConfigError("runs: must be >= 1");
        }
        if (!(run.grid_period >= 0.0)) {
            throw ConfigError("grid_period: must be >= 0");
        }
    });
    validate_section("fit", [&] {
        if (!(fit.interval > 0.0)) {
            throw ConfigError("interval: must be > 0");
        }
        if (!(fit.ingest.max_jitter >= 0.0)) {
            throw ConfigError("max_jitter: must be >= 0");
        }
        if (fit.ingest.max_jump_ratio && !(*fit.ingest.max_jump_ratio > 1.0)) {
            throw ConfigError("max_jump_ratio: must be > 1");
        }
        if (!(fit.fit.tolerance > 0.0)) {
            throw ConfigError("tolerance: must be > 0");
        }
    });
    validate_section("equilibrium", [&] {
        if (equilibrium.temperature && !(*equilibrium.temperature > 0.0)) {
            throw ConfigError("temperature: must be > 0");
        }
        for (double rho : equilibrium.rho) {
            if (!(1.0 + rho > 0.0)) {
                throw ConfigError("rho: every value must be > -1");
            }
        }
    });
}

std::vector<Assignment> parse_config(std::istream& in, const std::string& origin) {
    std::vector<Assignment> out;
    std::map<std::string, std::size_t> first_seen;
    std::set<std::string> sections_seen;
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& message) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + message);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail("malformed section header '" + std::string(line) + "'");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_section(section)) {
                fail("unknown section [" + section +
                     "] (expected device, sim, signal, run, fit or equilibrium)");
            }
            if (!sections_seen.insert(section).second) {
                fail("section [" + section + "] appears twice");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail("expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string name(trim(line.substr(0, eq)));
        if (name.empty()) {
            fail("missing key before '='");
        }
        if (section.empty()) {
            fail("key '" + name + "' appears before any [section]");
        }
        const std::string key = section + "." + name;
        if (!find_setter(key)) {
            fail("unknown key '" + name + "' in [" + section + "]");
        }
        if (const auto [it, fresh] = first_seen.emplace(key, line_no); !fresh) {
            fail("duplicate key '" + name + "' (first set on line " + std::to_string(it->second) +
                 ")");
        }
        out.push_back({key, std::string(trim(line.substr(eq + 1))), origin, line_no});
    }
    return out;
}

std::vector<Assignment> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    return parse_config(in, path.string());
}

Assignment parse_override(std::string_view text) {
    const auto eq = text.find('=');
    const auto key = trim(text.substr(0, eq));
    if (eq == std::string_view::npos || key.find('.') == std::string_view::npos) {
        throw ConfigError("--set: expected section.key=value, got '" + std::string(text) + "'");
    }
    if (!find_setter(key)) {
        throw ConfigError("--set: unknown key '" + std::string(key) + "'");
    }
    return {std::string(key), std::string(trim(text.substr(eq + 1))), "--set", 0};
}

void apply(RunConfig& config, const std::vector<Assignment>& assignments) {
    for (const auto& a : assignments) {
        const Setter* setter = find_setter(a.key);
        if (!setter) {
            throw ConfigError(a.where() + ": unknown key '" + a.key + "'");
        }
        try {
            (*setter)(config, a.value);
        } catch (const ConfigError& e) {
            throw ConfigError(a.where() + ": " + a.key + ": " + e.what());
        }
    }
}

void apply_and_validate(RunConfig& config, const std::vector<Assignment>& assignments) {
    apply(config, assignments);
    try {
        config.finalise();
        config.validate();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        std::string key = what.substr(0, what.find(':'));
        key = key.substr(0, key.find('/'));
        const auto it = std::find_if(assignments.rbegin(), assignments.rend(),
                                     [&](const Assignment& a) { return a.key == key; });
        if (it != assignments.rend()) {
            throw ConfigError(it->where() + ": " + what);
        }
        throw;
    }
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [name, setter] : key_table()) {
        keys.push_back(name);
    }
    return keys;
}

}  // namespace memswitch::cli
