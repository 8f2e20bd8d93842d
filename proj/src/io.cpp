#include "memswitch/io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string_view>
#include <vector>

namespace memswitch::io {

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    (void)ec;
    return std::string(buffer.data(), ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,n,R,T,rho,event\n";
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        out << format_double(trajectory.times[i]) << ',' << trajectory.n_values[i] << ','
            << format_double(trajectory.resistances[i]) << ','
            << format_double(trajectory.temperatures[i]) << ','
            << format_double(trajectory.rhos[i]) << ',' << to_string(trajectory.event_kinds[i])
            << '\n';
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad field '" +
                          std::string(field) + "'");
    }
    return value;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ConfigError("trajectory: empty input");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "t,n,R,T,rho,event") {
        throw ConfigError("trajectory line 1: expected header 't,n,R,T,rho,event'");
    }
    Trajectory traj;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != 6) {
            throw ConfigError("trajectory line " + std::to_string(line_no) + ": expected 6 columns");
        }
        DeviceState state;
        state.t = parse_field<double>(fields[0], line_no);
        state.n = parse_field<std::int64_t>(fields[1], line_no);
        const double r = parse_field<double>(fields[2], line_no);
        state.temperature = parse_field<double>(fields[3], line_no);
        state.rho = parse_field<double>(fields[4], line_no);
        EventKind kind{};
        try {
            kind = event_kind_from_string(fields[5]);
        } catch (const ConfigError&) {
            throw ConfigError("trajectory line " + std::to_string(line_no) + ": unknown event '" +
                              std::string(fields[5]) + "'");
        }
        if (!traj.times.empty() && !(state.t > traj.times.back())) {
            throw ConfigError("trajectory line " + std::to_string(line_no) +
                              ": times must be strictly increasing");
        }
        traj.append(state, r, kind);
    }
    if (traj.size() == 0) {
        throw ConfigError("trajectory: no records");
    }
    return traj;
}

void write_uniform_csv(std::ostream& out, const UniformSeries& series) {
    out << "t,n,R,T,rho\n";
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        out << format_double(series.times[k]) << ',' << format_double(series.n_values[k]) << ','
            << format_double(series.resistances[k]) << ','
            << format_double(series.temperatures[k]) << ',' << format_double(series.rhos[k])
            << '\n';
    }
}

UniformSeries read_uniform_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("uniform series: empty input");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "t,n,R,T,rho") {
        throw ConfigError("uniform series line 1: expected header 't,n,R,T,rho'");
    }
    UniformSeries series;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != 5) {
            throw ConfigError("uniform series line " + std::to_string(line_no) +
                              ": expected 5 columns");
        }
        const double t = parse_field<double>(fields[0], line_no);
        if (!series.times.empty() && !(t > series.times.back())) {
            throw ConfigError("uniform series line " + std::to_string(line_no) +
                              ": times must be strictly increasing");
        }
        series.times.push_back(t);
        series.n_values.push_back(parse_field<double>(fields[1], line_no));
        series.resistances.push_back(parse_field<double>(fields[2], line_no));
        series.temperatures.push_back(parse_field<double>(fields[3], line_no));
        series.rhos.push_back(parse_field<double>(fields[4], line_no));
    }
    if (series.times.empty()) {
        throw ConfigError("uniform series: no records");
    }
    return series;
}

nlohmann::ordered_json to_json(const DeviceParams& p) {
    return {
        {"N", p.N},
        {"n_thresh", p.n_thresh},
        {"g_step", p.g_step},
        {"g_parallel", p.g_parallel},
        {"V_a", p.V_a},
        {"V_off", p.V_off},
        {"T_bath", p.T_bath},
        {"tau_th", p.tau_th},
        {"R_th", p.R_th},
        {"c_volatile", p.c_volatile},
        {"tau_volatile", p.tau_volatile},
    };
}

std::string params_hash(const DeviceParams& params) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json(params).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
    return buffer;
}

nlohmann::ordered_json ensemble_json(const EnsembleStats& stats, const DeviceParams& params) {
    nlohmann::ordered_json quantiles = nlohmann::ordered_json::object();
    for (std::size_t q = 0; q < stats.quantile_levels.size(); ++q) {
        quantiles[format_double(stats.quantile_levels[q])] = stats.quantiles_r[q];
    }
    return {
        {"params_hash", params_hash(params)},
        {"n_runs", stats.n_runs},
        {"grid", stats.grid},
        {"mean", {{"n", stats.mean_n}, {"R", stats.mean_r}}},
        {"std", {{"n", stats.std_n}, {"R", stats.std_r}}},
        {"quantiles", {{"R", quantiles}}},
        {"final",
         {{"mean_n", stats.mean_final_n},
          {"std_n", stats.std_final_n},
          {"mean_R", stats.mean_final_r},
          {"std_R", stats.std_final_r},
          {"median_R", quantile(stats.final_r, 0.5)}}},
    };
}

nlohmann::ordered_json fit_report_json(const LinearConductanceFit& fit,
                                       std::optional<double> v_a, double interval,
                                       const DeviceParams& params) {
    nlohmann::ordered_json bins = nlohmann::ordered_json::array();
    for (const auto& b : fit.bins) {
        bins.push_back({{"R", b.r_value}, {"mean_delta_R", b.mean_delta_r}, {"count", b.count}});
    }
    return {
        {"a", fit.a},
        {"V_a", v_a ? nlohmann::ordered_json(*v_a) : nlohmann::ordered_json(nullptr)},
        {"interval", interval},
        {"residual", fit.residual},
        {"n_pairs", fit.n_pairs},
        {"bins_used", fit.bins.size()},
        {"bins", bins},
        {"params_hash", params_hash(params)},
    };
}

}  // namespace memswitch::io
