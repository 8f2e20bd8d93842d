#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "memswitch/core.hpp"
#include "memswitch/engine.hpp"
#include "memswitch/fit.hpp"

namespace memswitch::io {

/// Header `t,n,R,T,rho,event`; doubles written with round-trip precision.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// Inverse of write_trajectory_csv. Throws ConfigError on malformed input.
[[nodiscard]] Trajectory read_trajectory_csv(std::istream& in);

/// Header `t,n,R,T,rho`.
void write_uniform_csv(std::ostream& out, const UniformSeries& series);

/// Inverse of write_uniform_csv; the period is left at 0. Throws ConfigError.
[[nodiscard]] UniformSeries read_uniform_csv(std::istream& in);

[[nodiscard]] nlohmann::ordered_json to_json(const DeviceParams& params);

/// FNV-1a 64 of the canonical JSON form of the parameters, as 16 hex digits.
[[nodiscard]] std::string params_hash(const DeviceParams& params);

[[nodiscard]] nlohmann::ordered_json ensemble_json(const EnsembleStats& stats,
                                                   const DeviceParams& params);

/// V_a is written as null when absent (no drift, so no finite activation voltage).
[[nodiscard]] nlohmann::ordered_json fit_report_json(const LinearConductanceFit& fit,
                                                     std::optional<double> v_a, double interval,
                                                     const DeviceParams& params);

/// Shortest text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace memswitch::io
