#include "memswitch/rates.hpp"

#include <cmath>
#include <string>

namespace memswitch {

namespace {

double effective_thermal_voltage(double temperature, double rho) {
    if (!(temperature > 0.0)) {
        throw DomainError("temperature must be > 0");
    }
    if (!(1.0 + rho > 0.0)) {
        throw DomainError("1 + rho must be > 0 (rho = " + std::to_string(rho) + ")");
    }
    return thermal_voltage(temperature) * (1.0 + rho);
}

}  // namespace

LogBaseRates log_base_rates(double voltage, double temperature, double rho,
                            const DeviceParams& params) {
    const double vt = effective_thermal_voltage(temperature, rho);
    const double shift = 0.5 * (voltage + params.V_off);
    return {-(params.V_a - shift) / vt, -(params.V_a + shift) / vt};
}

BaseRates base_rates(double voltage, double temperature, double rho, const DeviceParams& params) {
    const auto logs = log_base_rates(voltage, temperature, rho, params);
    return {std::exp(logs.up), std::exp(logs.down)};
}

RatePair cumulative_rates(std::int64_t n, BaseRates base, const DeviceParams& params) {
    if (n < 0 || n > params.N) {
        throw DomainError("cumulative_rates: n outside [0, N]");
    }
    return {base.up, base.down, static_cast<double>(n) * base.up,
            static_cast<double>(params.N - n) * base.down};
}

double equilibrium_n(double voltage, double temperature, double rho, const DeviceParams& params) {
    const double x = (voltage + params.V_off) / effective_thermal_voltage(temperature, rho);
    const auto N = static_cast<double>(params.N);
    // N / (e^x + 1) without overflow for large |x|.
    if (x > 0.0) {
        const double e = std::exp(-x);
        return N * e / (1.0 + e);
    }
    return N / (std::exp(x) + 1.0);
}

double v_off_from_equilibrium(double n_eq, double temperature, const DeviceParams& params) {
    const auto N = static_cast<double>(params.N);
    if (!(n_eq > 0.0 && n_eq < N)) {
        throw DomainError("v_off_from_equilibrium: n_eq must lie strictly inside (0, N)");
    }
    if (!(temperature > 0.0)) {
        throw DomainError("temperature must be > 0");
    }
    return std::log((N - n_eq) / n_eq) * thermal_voltage(temperature);
}

double fit_va_constant_rate(double drift, double interval, double temperature,
                            const DeviceParams& params) {
    if (!(temperature > 0.0)) {
        throw DomainError("temperature must be > 0");
    }
    const double vt = thermal_voltage(temperature);
    const double argument = 2.0 * interval * static_cast<double>(params.n_thresh) *
                            std::sinh(params.V_off / (2.0 * vt)) / drift;
    if (!(drift > 0.0) || !(argument > 0.0) || !std::isfinite(argument)) {
        throw FitInfeasible("fit_va_constant_rate: requires drift > 0, interval > 0, "
                            "n_thresh > 0 and V_off > 0");
    }
    return vt * std::log(argument);
}

SinhIdentity net_rate_sinh_identity(double voltage, double temperature,
                                    const DeviceParams& params) {
    DeviceParams symmetric = params;
    symmetric.V_off = 0.0;
    const auto rates = base_rates(voltage, temperature, 0.0, symmetric);
    const double vt = thermal_voltage(temperature);
    return {rates.up - rates.down,
            2.0 * std::exp(-params.V_a / vt) * std::sinh(voltage / (2.0 * vt))};
}

}  // namespace memswitch
