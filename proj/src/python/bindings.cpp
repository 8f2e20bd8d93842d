#include <sstream>
#include <string>
#include <vector>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "memswitch/cli/commands.hpp"
#include "memswitch/core.hpp"
#include "memswitch/dynamics.hpp"
#include "memswitch/engine.hpp"
#include "memswitch/fit.hpp"
#include "memswitch/io.hpp"
#include "memswitch/rates.hpp"

namespace py = pybind11;
using namespace memswitch;

namespace {

py::dict trajectory_dict(const Trajectory& t) {
    py::dict d;
    d["t"] = t.times;
    d["n"] = t.n_values;
    d["R"] = t.resistances;
    d["T"] = t.temperatures;
    d["rho"] = t.rhos;
    std::vector<std::string> kinds;
    kinds.reserve(t.event_kinds.size());
    for (auto k : t.event_kinds) {
        kinds.emplace_back(to_string(k));
    }
    d["event"] = kinds;
    return d;
}

Trajectory trajectory_from(const py::dict& d) {
    Trajectory t;
    const auto times = d["t"].cast<std::vector<double>>();
    const auto n = d["n"].cast<std::vector<std::int64_t>>();
    const auto r = d["R"].cast<std::vector<double>>();
    const auto temp = d.contains("T") ? d["T"].cast<std::vector<double>>()
                                      : std::vector<double>(times.size(), 300.0);
    const auto rho = d.contains("rho") ? d["rho"].cast<std::vector<double>>()
                                       : std::vector<double>(times.size(), 0.0);
    if (n.size() != times.size() || r.size() != times.size() || temp.size() != times.size() ||
        rho.size() != times.size()) {
        throw ConfigError("trajectory columns must have equal length");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        t.append({n[i], temp[i], rho[i], times[i]}, r[i], EventKind::down);
    }
    return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Event-driven metastable-switch memristor simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<FitInfeasible>(m, "FitInfeasible", PyExc_RuntimeError);
    py::register_exception<DriftOutOfRange>(m, "DriftOutOfRange", PyExc_RuntimeError);

    py::class_<DeviceParams>(m, "DeviceParams")
        .def(py::init<>())
        .def_readwrite("N", &DeviceParams::N)
        .def_readwrite("n_thresh", &DeviceParams::n_thresh)
        .def_readwrite("g_step", &DeviceParams::g_step)
        .def_readwrite("g_parallel", &DeviceParams::g_parallel)
        .def_readwrite("V_a", &DeviceParams::V_a)
        .def_readwrite("V_off", &DeviceParams::V_off)
        .def_readwrite("T_bath", &DeviceParams::T_bath)
        .def_readwrite("tau_th", &DeviceParams::tau_th)
        .def_readwrite("R_th", &DeviceParams::R_th)
        .def_readwrite("c_volatile", &DeviceParams::c_volatile)
        .def_readwrite("tau_volatile", &DeviceParams::tau_volatile)
        .def("validate", &DeviceParams::validate)
        .def("params_hash", [](const DeviceParams& p) { return io::params_hash(p); })
        .def("__repr__", [](const DeviceParams& p) {
            return "DeviceParams(" + io::to_json(p).dump() + ")";
        });

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("duration", &SimConfig::duration)
        .def_readwrite("refresh_period", &SimConfig::refresh_period)
        .def_readwrite("record_period", &SimConfig::record_period)
        .def_readwrite("initial_resistance", &SimConfig::initial_resistance)
        .def_readwrite("initial_rho", &SimConfig::initial_rho)
        .def_readwrite("initial_temperature", &SimConfig::initial_temperature)
        .def_readwrite("joule_heating", &SimConfig::joule_heating)
        .def_readwrite("volatility", &SimConfig::volatility)
        .def_readwrite("series_resistance", &SimConfig::series_resistance)
        .def_property(
            "record_policy", [](const SimConfig& c) { return std::string(to_string(c.record_policy)); },
            [](SimConfig& c, const std::string& s) { c.record_policy = record_policy_from_string(s); })
        .def_property(
            "volatility_drive",
            [](const SimConfig& c) { return std::string(to_string(c.volatility_drive)); },
            [](SimConfig& c, const std::string& s) {
                c.volatility_drive = volatility_drive_from_string(s);
            })
        .def("validate", &SimConfig::validate);

    py::class_<PiecewiseSignal>(m, "PiecewiseSignal")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("breakpoints"),
             py::arg("amplitudes"))
        .def_static("constant", &PiecewiseSignal::constant, py::arg("voltage"), py::arg("duration"))
        .def_property_readonly("breakpoints",
                               [](const PiecewiseSignal& s) {
                                   return std::vector<double>(s.breakpoints().begin(),
                                                              s.breakpoints().end());
                               })
        .def_property_readonly("amplitudes",
                               [](const PiecewiseSignal& s) {
                                   return std::vector<double>(s.amplitudes().begin(),
                                                              s.amplitudes().end());
                               })
        .def_property_readonly("duration", &PiecewiseSignal::duration)
        .def("value_at", &PiecewiseSignal::value_at)
        .def("integral", &PiecewiseSignal::integral);

    m.def(
        "build_signal",
        [](const std::string& kind, double max_amplitude, double pulse_step, double pulse_duration,
           double duty_cycle, double period, std::size_t n_periods) {
            SignalSpec spec;
            spec.kind = signal_kind_from_string(kind);
            spec.max_amplitude = max_amplitude;
            spec.pulse_step = pulse_step;
            spec.pulse_duration = pulse_duration;
            spec.duty_cycle = duty_cycle;
            spec.period = period;
            spec.n_periods = n_periods;
            return build_signal(spec);
        },
        py::arg("kind"), py::arg("max_amplitude"), py::arg("pulse_step") = 0.01,
        py::arg("pulse_duration") = 1000.0, py::arg("duty_cycle") = 0.1, py::arg("period") = 1.0,
        py::arg("n_periods") = 1,
        "Standard drive signal: pulse_train_ascending, pulse_train_descending, alternating, "
        "sine or square.");

    m.def("thermal_voltage", &thermal_voltage, py::arg("temperature"));
    m.def("readout", &readout, py::arg("n"), py::arg("params"));
    m.def("invert_readout", &invert_readout, py::arg("resistance"), py::arg("params"));
    m.def("quantise",
          [](double r, const DeviceParams& p) {
              const auto bin = build_quantisation(p).quantise(r);
              return py::make_tuple(bin.index, bin.value);
          },
          py::arg("resistance"), py::arg("params"), "(bin index, representative resistance)");

    m.def(
        "base_rates",
        [](double v, double t, double rho, const DeviceParams& p) {
            const auto b = base_rates(v, t, rho, p);
            return py::make_tuple(b.up, b.down);
        },
        py::arg("voltage"), py::arg("temperature"), py::arg("rho"), py::arg("params"),
        "(lambda'_up, lambda'_down) per switch, 1/s");
    m.def("equilibrium_n", &equilibrium_n, py::arg("voltage"), py::arg("temperature"),
          py::arg("rho"), py::arg("params"));
    m.def("v_off_from_equilibrium", &v_off_from_equilibrium, py::arg("n_eq"),
          py::arg("temperature"), py::arg("params"));
    m.def("fit_va_constant_rate", &fit_va_constant_rate, py::arg("drift"), py::arg("interval"),
          py::arg("temperature"), py::arg("params"));
    m.def("advance_first_order", &advance_first_order, py::arg("value"), py::arg("steady"),
          py::arg("tau"), py::arg("dt"));

    m.def(
        "simulate",
        [](const SimConfig& config, const DeviceParams& params, const PiecewiseSignal& signal,
           std::uint64_t seed) {
            Trajectory t;
            {
                py::gil_scoped_release release;
                t = simulate(config, params, signal, seed);
            }
            return trajectory_dict(t);
        },
        py::arg("config"), py::arg("params"), py::arg("signal"), py::arg("seed"),
        "One run; returns a dict of columns t, n, R, T, rho, event.");

    m.def(
        "run_ensemble",
        [](const SimConfig& config, const DeviceParams& params, const PiecewiseSignal& signal,
           std::size_t n_runs, std::uint64_t seed, double grid_period, unsigned threads) {
            EnsembleOptions options;
            options.n_runs = n_runs;
            options.master_seed = seed;
            options.grid_period = grid_period;
            options.threads = threads;
            EnsembleStats stats;
            {
                py::gil_scoped_release release;
                stats = run_ensemble(config, params, signal, options);
            }
            return py::module_::import("json").attr("loads")(
                io::ensemble_json(stats, params).dump());
        },
        py::arg("config"), py::arg("params"), py::arg("signal"), py::arg("n_runs"),
        py::arg("seed"), py::arg("grid_period") = 0.0, py::arg("threads") = 0,
        "Ensemble statistics as the ensemble JSON document (a dict).");

    m.def(
        "resample",
        [](const py::dict& trajectory, double period, double total) {
            const auto u = resample_uniform(trajectory_from(trajectory), period, total);
            py::dict d;
            d["t"] = u.times;
            d["n"] = u.n_values;
            d["R"] = u.resistances;
            d["T"] = u.temperatures;
            d["rho"] = u.rhos;
            return d;
        },
        py::arg("trajectory"), py::arg("period"), py::arg("total"),
        "Sample-and-hold of a trajectory dict on the grid k * period, k = 0..floor(total/period).");

    m.def("predict_delta_r", &predict_delta_r, py::arg("r_initial"), py::arg("drift"),
          py::arg("params"));
    m.def(
        "fit_linear_conductance",
        [](const std::vector<std::pair<double, double>>& pairs, const DeviceParams& params,
           std::size_t min_pairs_per_bin) {
            DriftPairSet set;
            for (const auto& [a, b] : pairs) {
                set.pairs.push_back({a, b});
            }
            LinearFitOptions options;
            options.min_pairs_per_bin = min_pairs_per_bin;
            const auto fit = fit_linear_conductance(set, params, options);
            py::dict d;
            d["a"] = fit.a;
            d["residual"] = fit.residual;
            d["n_pairs"] = fit.n_pairs;
            d["bins_used"] = fit.bins.size();
            d["objective_trace"] = fit.objective_trace;
            return d;
        },
        py::arg("pairs"), py::arg("params"), py::arg("min_pairs_per_bin") = 5,
        "Fit the drift a from (R_initial, R_final) pairs.");

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"memswitch"};
            for (const auto& a : args) {
                argv.push_back(a.c_str());
            }
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in-process; returns (exit code, stdout, stderr).");
}
