#include "memswitch/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace memswitch {

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) {
        throw ConfigError(std::string(field) + ": " + what);
    }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

double thermal_voltage(double temperature) {
    return phys::k_B * temperature / phys::q;
}

void DeviceParams::validate() const {
    require(N >= 1, "N", "must be >= 1");
    require(n_thresh >= 0 && n_thresh <= N, "n_thresh", "must lie in [0, N]");
    require(finite(g_step) && g_step > 0.0, "g_step", "must be > 0");
    require(finite(g_parallel) && g_parallel > 0.0, "g_parallel", "must be > 0");
    require(finite(V_a), "V_a", "must be finite");
    require(finite(V_off), "V_off", "must be finite");
    require(finite(T_bath) && T_bath > 0.0, "T_bath", "must be > 0");
    require(finite(tau_th) && tau_th > 0.0, "tau_th", "must be > 0");
    require(finite(R_th) && R_th > 0.0, "R_th", "must be > 0");
    require(finite(c_volatile), "c_volatile", "must be finite");
    require(finite(tau_volatile) && tau_volatile > 0.0, "tau_volatile", "must be > 0");
}

double conductance(double n, const DeviceParams& params) {
    const double active = std::max(n - static_cast<double>(params.n_thresh), 0.0);
    return params.g_parallel + params.g_step * active;
}

double readout(std::int64_t n, const DeviceParams& params) {
    if (n < 0 || n > params.N) {
        throw DomainError("readout: n = " + std::to_string(n) + " outside [0, " +
                          std::to_string(params.N) + "]");
    }
    return 1.0 / conductance(static_cast<double>(n), params);
}

std::int64_t invert_readout(double resistance, const DeviceParams& params) {
    if (!(resistance > 0.0)) {
        throw DomainError("invert_readout: resistance must be > 0");
    }
    const double excess = 1.0 / resistance - params.g_parallel;
    if (excess <= 0.0) {
        return params.n_thresh;
    }
    const double n = static_cast<double>(params.n_thresh) + excess / params.g_step;
    const double clamped =
        std::clamp(std::round(n), static_cast<double>(params.n_thresh), static_cast<double>(params.N));
    return static_cast<std::int64_t>(clamped);
}

QuantisationScheme::QuantisationScheme(const DeviceParams& params) : n_thresh_(params.n_thresh) {
    if (params.n_thresh >= params.N) {
        throw ConfigError("quantisation: n_thresh must be < N");
    }
    const auto count = static_cast<std::size_t>(params.N - params.n_thresh + 1);
    values_.reserve(count);
    boundaries_.reserve(count + 1);
    boundaries_.push_back(std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < count; ++i) {
        const double n = static_cast<double>(params.n_thresh) + static_cast<double>(i);
        values_.push_back(1.0 / conductance(n, params));
        if (i + 1 < count) {
            boundaries_.push_back(1.0 / conductance(n + 0.5, params));
        }
    }
    boundaries_.push_back(-std::numeric_limits<double>::infinity());
}

QuantisationScheme::Bin QuantisationScheme::quantise(double resistance) const {
    if (!(resistance > 0.0)) {
        throw DomainError("quantise: resistance must be > 0");
    }
    // First boundary strictly below R; boundaries are decreasing.
    const auto it = std::partition_point(boundaries_.begin(), boundaries_.end(),
                                         [resistance](double b) { return b >= resistance; });
    const auto index = static_cast<std::size_t>(it - boundaries_.begin()) - 1;
    return {index, values_[index]};
}

QuantisationScheme build_quantisation(const DeviceParams& params) {
    return QuantisationScheme(params);
}

}  // namespace memswitch
