#include "memswitch/fit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>

namespace memswitch {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line, const char* column) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse " + column + " '" +
                          std::string(field) + "'");
    }
    return value;
}

struct Sample {
    double t;
    double r;
};

bool jump_outlier(double previous, double current, const IngestOptions& options) {
    if (!options.max_jump_ratio) {
        return false;
    }
    const double ratio = current / previous;
    return ratio > *options.max_jump_ratio || ratio < 1.0 / *options.max_jump_ratio;
}

}  // namespace

IngestResult ingest_series(std::istream& source, const IngestOptions& options) {
    IngestResult result;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::map<std::string, std::vector<Sample>> devices;

    while (std::getline(source, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        if (!header_seen) {
            std::string header;
            for (char c : content) {
                if (c != ' ' && c != '\t') {
                    header.push_back(c);
                }
            }
            if (header != "device_id,t_seconds,resistance_ohm") {
                throw ConfigError("line " + std::to_string(line_no) +
                                  ": expected header 'device_id,t_seconds,resistance_ohm'");
            }
            header_seen = true;
            continue;
        }
        const auto c1 = content.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : content.find(',', c1 + 1);
        if (c2 == std::string_view::npos || content.find(',', c2 + 1) != std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 3 columns");
        }
        const std::string id(trim(content.substr(0, c1)));
        const double t = parse_number(content.substr(c1 + 1, c2 - c1 - 1), line_no, "t_seconds");
        const double r = parse_number(content.substr(c2 + 1), line_no, "resistance_ohm");
        devices[id].push_back({t, r});
    }

    for (auto& [id, samples] : devices) {
        std::stable_sort(samples.begin(), samples.end(),
                         [](const Sample& a, const Sample& b) { return a.t < b.t; });
        if (samples.size() < 2) {
            result.rejected.push_back({id, "fewer than two samples"});
            continue;
        }
        std::vector<double> gaps;
        gaps.reserve(samples.size() - 1);
        for (std::size_t i = 1; i < samples.size(); ++i) {
            gaps.push_back(samples[i].t - samples[i - 1].t);
        }
        std::vector<double> sorted = gaps;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                         sorted.end());
        const double period = sorted[sorted.size() / 2];
        if (!(period > 0.0) || !std::isfinite(period)) {
            result.rejected.push_back({id, "non-increasing timestamps"});
            continue;
        }
        const auto worst = std::max_element(gaps.begin(), gaps.end(), [period](double a, double b) {
            return std::abs(a - period) < std::abs(b - period);
        });
        if (std::abs(*worst - period) > options.max_jitter * period) {
            const auto at = static_cast<std::size_t>(worst - gaps.begin()) + 1;
            result.rejected.push_back(
                {id, "non-uniform sampling: gap of " + std::to_string(*worst) + " s before t = " +
                         std::to_string(samples[at].t) + " (period " + std::to_string(period) +
                         " s)"});
            continue;
        }

        DriftSeries current{id, 0.0, period, {}};
        auto flush = [&] {
            if (current.resistances.size() >= 2) {
                result.series.push_back(std::move(current));
            }
            current = DriftSeries{id, 0.0, period, {}};
        };
        for (const auto& s : samples) {
            const bool invalid = !std::isfinite(s.r) || !(s.r > 0.0) ||
                                 (!current.resistances.empty() &&
                                  jump_outlier(current.resistances.back(), s.r, options));
            if (invalid) {
                ++result.dropped_rows;
                flush();
                continue;
            }
            if (current.resistances.empty()) {
                current.start_time = s.t;
            }
            current.resistances.push_back(s.r);
        }
        flush();
    }
    return result;
}

DriftPairSet extract_pairs(const DriftSeries& series, double interval) {
    if (!(interval > 0.0) || !(series.sample_period > 0.0)) {
        throw ConfigError("interval and sample period must be > 0");
    }
    const double ratio = interval / series.sample_period;
    const double k_real = std::round(ratio);
    if (k_real < 1.0 || std::abs(ratio - k_real) > 1e-9 * ratio) {
        throw ConfigError("interval " + std::to_string(interval) +
                          " s is not a whole multiple of the sample period " +
                          std::to_string(series.sample_period) + " s");
    }
    const auto k = static_cast<std::size_t>(k_real);
    DriftPairSet out;
    out.interval = interval;
    for (std::size_t j = 0; (j + 1) * k < series.resistances.size(); ++j) {
        out.pairs.push_back({series.resistances[j * k], series.resistances[(j + 1) * k]});
    }
    return out;
}

DriftSeries quantise_series(const DriftSeries& series, const QuantisationScheme& scheme) {
    DriftSeries out = series;
    for (double& r : out.resistances) {
        r = scheme.quantise(r).value;
    }
    return out;
}

double predict_delta_r(double r_initial, double drift, const DeviceParams& params) {
    if (!(r_initial > 0.0)) {
        throw DomainError("predict_delta_r: R_init must be > 0");
    }
    // x = a g_step R; dR = R x / (1 - x) avoids cancellation in 1/G' - R.
    const double x = drift * params.g_step * r_initial;
    if (!(x < 1.0)) {
        throw DriftOutOfRange("predict_delta_r: drift " + std::to_string(drift) +
                              " leaves non-positive conductance from R_init = " +
                              std::to_string(r_initial));
    }
    return r_initial * x / (1.0 - x);
}

std::vector<BinMean> bin_mean_changes(const DriftPairSet& pairs, const QuantisationScheme& scheme,
                                      std::size_t min_pairs_per_bin) {
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const auto& p : pairs.pairs) {
        auto& [sum, count] = acc[scheme.quantise(p.r_initial).index];
        sum += p.r_final - p.r_initial;
        ++count;
    }
    std::vector<BinMean> bins;
    for (const auto& [index, entry] : acc) {
        if (entry.second >= std::max<std::size_t>(min_pairs_per_bin, 1)) {
            bins.push_back({scheme.values()[index], entry.first / static_cast<double>(entry.second),
                            entry.second});
        }
    }
    return bins;
}

double linear_conductance_objective(const std::vector<BinMean>& bins, double drift,
                                    const DeviceParams& params) {
    double sum = 0.0;
    for (const auto& bin : bins) {
        const double e = bin.mean_delta_r - predict_delta_r(bin.r_value, drift, params);
        sum += e * e;
    }
    return sum;
}

LinearConductanceFit fit_linear_conductance(const DriftPairSet& pairs, const DeviceParams& params,
                                            const LinearFitOptions& options) {
    params.validate();
    const auto scheme = build_quantisation(params);
    LinearConductanceFit fit;
    fit.n_pairs = pairs.pairs.size();
    fit.bins = bin_mean_changes(pairs, scheme, options.min_pairs_per_bin);
    if (fit.bins.empty()) {
        throw FitInfeasible("linear conductance fit needs an initial-resistance bin with >= " +
                            std::to_string(options.min_pairs_per_bin) + " pairs (have " +
                            std::to_string(fit.n_pairs) + " pairs in total)");
    }

    double min_conductance = 1.0 / fit.bins.front().r_value;
    for (const auto& bin : fit.bins) {
        min_conductance = std::min(min_conductance, 1.0 / bin.r_value);
    }
    auto objective = [&](double a) { return linear_conductance_objective(fit.bins, a, params); };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = 0.5 * min_conductance / params.g_step;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = objective(c);
    double fd = objective(d);
    while (hi - lo > options.tolerance) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(d);
        }
        fit.objective_trace.push_back(std::min(fc, fd));
    }
    fit.a = 0.5 * (lo + hi);
    if (lo == 0.0 && objective(0.0) <= objective(fit.a)) {
        fit.a = 0.0;
    }
    fit.residual = objective(fit.a) / static_cast<double>(fit.bins.size());
    return fit;
}

// --- GMSM --------------------------------------------------------------------

double GmsmParams::p_a(double voltage) const {
    return alpha / (1.0 + std::exp(beta * (voltage - V_A)));
}

double GmsmParams::p_b(double voltage) const {
    return alpha / (1.0 + std::exp(beta * (-voltage + V_B)));
}

void GmsmParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("gmsm alpha must lie in [0, 1]");
    }
}

GmsmParams gmsm_matching(double up_rate, double down_rate, double voltage, double temperature,
                         double dt, double t_c) {
    if (!(up_rate > 0.0 && down_rate > 0.0)) {
        throw DomainError("gmsm_matching: rates must be > 0");
    }
    GmsmParams g;
    g.dt = dt;
    g.t_c = t_c;
    g.alpha = dt / t_c;
    g.beta = 1.0 / thermal_voltage(temperature);
    const double p_up = -std::expm1(-up_rate * dt);
    const double p_down = -std::expm1(-down_rate * dt);
    if (!(p_up < g.alpha && p_down < g.alpha && g.alpha <= 1.0)) {
        throw ConfigError("gmsm_matching: need per-step probabilities below alpha <= 1");
    }
    // alpha / (1 + e^{beta (V - V_A)}) = p_up, alpha / (1 + e^{beta (V_B - V)}) = p_down.
    g.V_A = voltage - std::log(g.alpha / p_up - 1.0) / g.beta;
    g.V_B = voltage + std::log(g.alpha / p_down - 1.0) / g.beta;
    return g;
}

std::int64_t gmsm_oracle_step(std::int64_t n, std::int64_t N, double voltage,
                              const GmsmParams& gmsm, RngStream& rng) {
    gmsm.validate();
    const double pa = gmsm.p_a(voltage);
    const double pb = gmsm.p_b(voltage);
    if (!(pa >= 0.0 && pa <= 1.0 && pb >= 0.0 && pb <= 1.0)) {
        throw ConfigError("gmsm step probability outside [0, 1]");
    }
    const bool standard = gmsm.orientation == GmsmOrientation::standard;
    const double p_up = standard ? pa : pb;
    const double p_down = standard ? pb : pa;
    std::binomial_distribution<std::int64_t> ups(n, p_up);
    std::binomial_distribution<std::int64_t> downs(N - n, p_down);
    const std::int64_t k_up = ups(rng);
    const std::int64_t k_down = downs(rng);
    return std::clamp<std::int64_t>(n - k_up + k_down, 0, N);
}

}  // namespace memswitch
