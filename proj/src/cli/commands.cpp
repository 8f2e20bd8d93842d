#include "memswitch/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "memswitch/cli/presets.hpp"
#include "memswitch/io.hpp"
#include "memswitch/rates.hpp"

namespace memswitch::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    body(out);
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

void write_json(const fs::path& path, const ordered_json& json) {
    write_file(path, [&](std::ostream& out) { out << json.dump(2) << '\n'; });
}

std::string run_file_name(std::size_t run) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "run_%04zu.csv", run);
    return buffer;
}

EnsembleOptions ensemble_options(const RunConfig& config) {
    EnsembleOptions options;
    options.n_runs = config.run.runs;
    options.master_seed = config.run.seed;
    options.grid_period = config.run.grid_period;
    options.threads = config.run.threads;
    return options;
}

double grid_period_of(const RunConfig& config) {
    return config.run.grid_period > 0.0 ? config.run.grid_period : config.sim.duration / 100.0;
}

ordered_json state_json(const DeviceState& s, double resistance) {
    return {{"t", s.t}, {"n", s.n}, {"R", resistance}, {"T", s.temperature}, {"rho", s.rho}};
}

}  // namespace

RunConfig load_run_config(const CommonOptions& common, RunConfig base) {
    std::vector<Assignment> assignments;
    if (common.config) {
        assignments = read_config_file(*common.config);
    }
    for (const auto& text : common.overrides) {
        assignments.push_back(parse_override(text));
    }
    apply_and_validate(base, assignments);
    if (common.seed) {
        base.run.seed = *common.seed;
    }
    if (common.runs) {
        base.run.runs = *common.runs;
    }
    base.validate();
    return base;
}

// --- simulate ------------------------------------------------------------------

void cmd_simulate(const CommonOptions& common, std::ostream& out) {
    const RunConfig config = load_run_config(common);
    const auto signal = config.make_signal();
    fs::create_directories(common.out_dir);

    const auto started = std::chrono::steady_clock::now();
    Simulator simulator(config.device, config.sim, signal, config.run.seed);
    const Trajectory trajectory = simulator.run();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    write_file(common.out_dir / "trajectory.csv",
               [&](std::ostream& os) { io::write_trajectory_csv(os, trajectory); });

    const auto& counts = simulator.counts();
    ordered_json summary = {
        {"params_hash", io::params_hash(config.device)},
        {"seed", config.run.seed},
        {"duration", config.sim.duration},
        {"records", trajectory.size()},
        {"final", state_json(simulator.state(), simulator.resistance())},
        {"events",
         {{"up", counts.up},
          {"down", counts.down},
          {"signal", counts.signal},
          {"refresh", counts.refresh},
          {"total", counts.total()}}},
    };
    if (config.run.runs > 1) {
        const auto stats = run_ensemble(config.sim, config.device, signal, ensemble_options(config));
        write_json(common.out_dir / "ensemble.json", io::ensemble_json(stats, config.device));
        summary["ensemble"] = "ensemble.json";
    }
    write_json(common.out_dir / "summary.json", summary);

    if (common.json) {
        ordered_json printed = summary;
        printed["wall_time_s"] = wall;
        out << printed.dump(2) << '\n';
    } else {
        out << "final R = " << io::format_double(simulator.resistance()) << " Ohm, n = "
            << simulator.state().n << ", events = " << counts.total() << " (up " << counts.up
            << ", down " << counts.down << ", signal " << counts.signal << ", refresh "
            << counts.refresh << ")\n"
            << "wall time " << std::fixed << std::setprecision(3) << wall << " s\n"
            << std::defaultfloat << "wrote " << (common.out_dir / "trajectory.csv").string()
            << ", " << (common.out_dir / "summary.json").string() << '\n';
    }
}

// --- equilibrium ---------------------------------------------------------------

void cmd_equilibrium(const CommonOptions& common, const EquilibriumOptions& options,
                     std::ostream& out) {
    const RunConfig config = load_run_config(common);
    const auto& p = config.device;
    const double voltage = options.voltage.value_or(config.equilibrium.voltage);
    const double temperature =
        options.temperature.value_or(config.equilibrium.temperature.value_or(p.T_bath));
    const std::vector<double> rhos = options.rho.empty() ? config.equilibrium.rho : options.rho;

    ordered_json rows = ordered_json::array();
    for (double rho : rhos) {
        const double n_eq = equilibrium_n(voltage, temperature, rho, p);
        const auto n_round = std::clamp<std::int64_t>(std::llround(n_eq), 0, p.N);
        const auto base = base_rates(voltage, temperature, rho, p);
        rows.push_back({{"rho", rho},
                        {"n_eq", n_eq},
                        {"n_eq_rounded", n_round},
                        {"R_eq", readout(n_round, p)},
                        {"lambda_up_base", base.up},
                        {"lambda_down_base", base.down}});
    }
    if (common.json) {
        const ordered_json doc = {{"params_hash", io::params_hash(p)},
                                  {"voltage", voltage},
                                  {"temperature", temperature},
                                  {"rows", rows}};
        out << doc.dump(2) << '\n';
        return;
    }
    out << "V = " << voltage << " V, T = " << temperature << " K, N = " << p.N
        << ", n_thresh = " << p.n_thresh << '\n';
    out << std::setw(10) << "rho" << std::setw(16) << "n_eq" << std::setw(16) << "R_eq"
        << std::setw(16) << "lambda'_up" << std::setw(16) << "lambda'_down" << '\n';
    for (const auto& row : rows) {
        out << std::setw(10) << row["rho"].get<double>() << std::setw(16) << std::setprecision(8)
            << row["n_eq"].get<double>() << std::setw(16) << std::setprecision(6)
            << row["R_eq"].get<double>() << std::setw(16) << row["lambda_up_base"].get<double>()
            << std::setw(16) << row["lambda_down_base"].get<double>() << '\n';
    }
}

// --- experiment ----------------------------------------------------------------

namespace {

void write_trace(std::ostream& os, TraceKind kind, const UniformSeries& u,
                 const PiecewiseSignal& signal, const SimConfig& sim) {
    using io::format_double;
    switch (kind) {
        case TraceKind::state:
            io::write_uniform_csv(os, u);
            return;
        case TraceKind::vi_loop:
            os << "t,V,I,R\n";
            for (std::size_t k = 0; k < u.times.size(); ++k) {
                const double v = signal.value_at(u.times[k]);
                os << format_double(u.times[k]) << ',' << format_double(v) << ','
                   << format_double(v / u.resistances[k]) << ','
                   << format_double(u.resistances[k]) << '\n';
            }
            return;
        case TraceKind::current:
            os << "t,V_in,V,I,R,rho\n";
            for (std::size_t k = 0; k < u.times.size(); ++k) {
                const double v_in = signal.value_at(u.times[k]);
                const double total = u.resistances[k] + sim.series_resistance;
                os << format_double(u.times[k]) << ',' << format_double(v_in) << ','
                   << format_double(v_in * u.resistances[k] / total) << ','
                   << format_double(v_in / total) << ',' << format_double(u.resistances[k])
                   << ',' << format_double(u.rhos[k]) << '\n';
            }
            return;
    }
}

std::vector<double> current_trace(const UniformSeries& u, const PiecewiseSignal& signal,
                                  const SimConfig& sim) {
    std::vector<double> current(u.times.size());
    for (std::size_t k = 0; k < u.times.size(); ++k) {
        current[k] = signal.value_at(u.times[k]) / (u.resistances[k] + sim.series_resistance);
    }
    return current;
}

}  // namespace

void cmd_experiment(const CommonOptions& common, std::optional<std::string> preset_name,
                    std::ostream& out) {
    // The preset may come from the command line or from [run] preset.
    std::optional<std::string> name = preset_name;
    if (!name) {
        RunConfig probe = load_run_config(common);
        name = probe.run.preset;
    }
    if (!name) {
        throw ConfigError("experiment: no preset given (positional argument or [run] preset)");
    }
    const Preset preset = preset_from_string(*name);
    const RunConfig base = load_run_config(common, preset_config(preset));
    const auto variants = preset_variants(preset, base);
    const TraceKind trace = preset_trace(preset);
    fs::create_directories(common.out_dir);

    ordered_json summary = {
        {"preset", to_string(preset)},
        {"seed", base.run.seed},
        {"n_runs", base.run.runs},
        {"params_hash", io::params_hash(base.device)},
        {"variants", ordered_json::array()},
    };
    std::mutex write_mutex;
    for (const auto& variant : variants) {
        const RunConfig& c = variant.config;
        const auto signal = c.make_signal();
        const double period = grid_period_of(c);
        const fs::path run_dir = common.out_dir / variant.label;
        if (c.run.per_run_files) {
            fs::create_directories(run_dir);
        }
        std::vector<std::size_t> excursions(c.run.runs, 0);

        auto options = ensemble_options(c);
        options.on_run = [&](std::size_t run, const Trajectory& traj) {
            const auto u = resample_uniform(traj, period, c.sim.duration);
            if (trace == TraceKind::current) {
                excursions[run] = count_excursions(current_trace(u, signal, c.sim),
                                                   preset_values::kSpikeFactor);
            }
            if (c.run.per_run_files) {
                std::lock_guard lock(write_mutex);
                write_file(run_dir / run_file_name(run),
                           [&](std::ostream& os) { write_trace(os, trace, u, signal, c.sim); });
            }
        };
        const auto stats = run_ensemble(c.sim, c.device, signal, options);

        auto ensemble = io::ensemble_json(stats, c.device);
        ensemble["label"] = variant.label;
        write_json(common.out_dir / ("ensemble_" + variant.label + ".json"), ensemble);

        ordered_json entry = {
            {"label", variant.label},
            {"params_hash", io::params_hash(c.device)},
            {"initial_resistance", c.sim.initial_resistance},
            {"duration", c.sim.duration},
            {"final",
             {{"median_R", quantile(stats.final_r, 0.5)},
              {"mean_R", stats.mean_final_r},
              {"std_R", stats.std_final_r},
              {"mean_n", stats.mean_final_n}}},
        };
        if (preset == Preset::frequency_potentiation) {
            entry["frequency_hz"] = 1.0 / c.signal.spec.period;
        }
        if (trace == TraceKind::current) {
            std::size_t with_spike = 0;
            for (auto e : excursions) {
                with_spike += e > 0 ? 1 : 0;
            }
            entry["spike_factor"] = preset_values::kSpikeFactor;
            entry["excursions"] = excursions;
            entry["runs_with_excursion"] = with_spike;
        }
        summary["variants"].push_back(entry);

        if (!common.json) {
            out << to_string(preset) << " " << variant.label << ": median final R = "
                << io::format_double(quantile(stats.final_r, 0.5)) << " Ohm over "
                << c.run.runs << " runs";
            if (trace == TraceKind::current) {
                out << ", runs with a current excursion: "
                    << entry["runs_with_excursion"].get<std::size_t>();
            }
            out << '\n';
        }
    }
    write_json(common.out_dir / "experiment.json", summary);
    if (common.json) {
        out << summary.dump(2) << '\n';
    }
}

// --- fit -------------------------------------------------------------------------

void cmd_fit(const CommonOptions& common, const FitOptions& options, std::ostream& out) {
    const RunConfig config = load_run_config(common);
    const double interval = options.interval.value_or(config.fit.interval);
    if (!(interval > 0.0)) {
        throw ConfigError("--interval: must be > 0");
    }
    std::ifstream in(options.dataset);
    if (!in) {
        throw ConfigError(options.dataset.string() + ": cannot open dataset");
    }
    IngestResult ingest;
    try {
        ingest = ingest_series(in, config.fit.ingest);
    } catch (const ConfigError& e) {
        throw ConfigError(options.dataset.string() + ": " + e.what());
    }
    if (ingest.series.empty()) {
        throw FitInfeasible("no usable series in " + options.dataset.string());
    }
    const auto scheme = build_quantisation(config.device);
    DriftPairSet pairs;
    pairs.interval = interval;
    for (const auto& series : ingest.series) {
        const auto& source = config.fit.quantise ? quantise_series(series, scheme) : series;
        const auto set = extract_pairs(source, interval);
        pairs.pairs.insert(pairs.pairs.end(), set.pairs.begin(), set.pairs.end());
    }
    const auto fit = fit_linear_conductance(pairs, config.device, config.fit.fit);
    std::optional<double> v_a;
    if (fit.a > 0.0) {
        try {
            v_a = fit_va_constant_rate(fit.a, interval, config.device.T_bath, config.device);
        } catch (const FitInfeasible&) {
        }
    }

    auto report = io::fit_report_json(fit, v_a, interval, config.device);
    report["series"] = ingest.series.size();
    report["dropped_rows"] = ingest.dropped_rows;
    ordered_json rejected = ordered_json::array();
    for (const auto& r : ingest.rejected) {
        rejected.push_back({{"device_id", r.device_id}, {"reason", r.reason}});
    }
    report["rejected_devices"] = rejected;

    fs::create_directories(common.out_dir);
    write_json(common.out_dir / "fit_report.json", report);
    if (common.json) {
        out << report.dump(2) << '\n';
    } else {
        out << "a = " << io::format_double(fit.a) << " switches per interval, V_a = "
            << (v_a ? io::format_double(*v_a) + " V" : std::string("undefined (a = 0)"))
            << ", residual = " << io::format_double(fit.residual) << " Ohm^2, " << fit.n_pairs
            << " pairs in " << fit.bins.size() << " bins\n";
        for (const auto& r : ingest.rejected) {
            out << "rejected " << r.device_id << ": " << r.reason << '\n';
        }
    }
}

// --- resample --------------------------------------------------------------------

void cmd_resample(const CommonOptions& common, const ResampleOptions& options,
                  std::ostream& out) {
    if (!(options.period > 0.0) || !std::isfinite(options.period)) {
        throw ConfigError("--period: must be > 0");
    }
    if (options.total && !(*options.total >= 0.0)) {
        throw ConfigError("--total: must be >= 0");
    }
    std::ifstream in(options.input);
    if (!in) {
        throw ConfigError(options.input.string() + ": cannot open trajectory");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string header;
    std::getline(buffer, header);
    if (!header.empty() && header.back() == '\r') {
        header.pop_back();
    }
    buffer.clear();
    buffer.seekg(0);

    UniformSeries result;
    try {
        if (header == "t,n,R,T,rho") {
            const auto input = io::read_uniform_csv(buffer);
            const double total = options.total.value_or(input.times.back());
            result.period = options.period;
            result.n_values = resample_hold(input.times, input.n_values, options.period, total);
            result.resistances =
                resample_hold(input.times, input.resistances, options.period, total);
            result.temperatures =
                resample_hold(input.times, input.temperatures, options.period, total);
            result.rhos = resample_hold(input.times, input.rhos, options.period, total);
            for (std::size_t k = 0; k < result.n_values.size(); ++k) {
                result.times.push_back(static_cast<double>(k) * options.period);
            }
        } else {
            const auto input = io::read_trajectory_csv(buffer);
            result = resample_uniform(input, options.period,
                                      options.total.value_or(input.times.back()));
        }
    } catch (const ConfigError& e) {
        throw ConfigError(options.input.string() + ": " + e.what());
    }

    fs::create_directories(common.out_dir);
    const auto path = common.out_dir / "uniform.csv";
    write_file(path, [&](std::ostream& os) { io::write_uniform_csv(os, result); });
    if (common.json) {
        const ordered_json doc = {{"output", path.string()},
                                  {"rows", result.times.size()},
                                  {"period", options.period}};
        out << doc.dump(2) << '\n';
    } else {
        out << "wrote " << result.times.size() << " rows to " << path.string() << '\n';
    }
}

// --- entry point -----------------------------------------------------------------

namespace {

void add_common(CLI::App& sub, CommonOptions& common) {
    sub.add_option("--config", common.config, "Run configuration file")->check(CLI::ExistingFile);
    sub.add_option("--set", common.overrides, "Override one key: section.key=value")
        ->allow_extra_args(false);
    sub.add_option("--seed", common.seed, "Master seed (unsigned 64-bit)");
    sub.add_option("--runs", common.runs, "Number of runs")->check(CLI::PositiveNumber);
    sub.add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    sub.add_flag("--json", common.json, "Machine-readable output on stdout");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Event-driven stochastic simulator and calibration toolkit for "
                 "metastable-switch memristor models",
                 "memswitch"};
    app.require_subcommand(1);

    CommonOptions common;
    EquilibriumOptions eq;
    FitOptions fit;
    ResampleOptions resample;
    std::optional<std::string> preset;
    bool list_presets = false;

    auto* simulate = app.add_subcommand("simulate", "Run one simulation and write its trajectory");
    add_common(*simulate, common);

    auto* equilibrium =
        app.add_subcommand("equilibrium", "Equilibrium switch count, resistance and base rates");
    add_common(*equilibrium, common);
    equilibrium->add_option("--voltage", eq.voltage, "Device voltage, V");
    equilibrium->add_option("--temperature", eq.temperature, "Temperature, K");
    equilibrium->add_option("--rho", eq.rho, "Volatility values")->delimiter(',');

    auto* experiment = app.add_subcommand("experiment", "Run an experiment preset ensemble");
    add_common(*experiment, common);
    experiment->add_option("preset", preset, "Preset name");
    experiment->add_flag("--list", list_presets, "List presets and exit");

    auto* fit_cmd = app.add_subcommand("fit", "Fit the linear conductance drift model to a dataset");
    add_common(*fit_cmd, common);
    fit_cmd->add_option("dataset", fit.dataset, "CSV with device_id,t_seconds,resistance_ohm")
        ->required();
    fit_cmd->add_option("--interval", fit.interval, "Pair interval, s");

    auto* resample_cmd = app.add_subcommand("resample", "Sample-and-hold a trajectory on a grid");
    add_common(*resample_cmd, common);
    resample_cmd->add_option("trajectory", resample.input, "Trajectory or uniform CSV")
        ->required();
    resample_cmd->add_option("--period", resample.period, "Sample period T_sample, s")
        ->required();
    resample_cmd->add_option("--total", resample.total, "Total time T_tot, s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            cmd_simulate(common, out);
        } else if (equilibrium->parsed()) {
            cmd_equilibrium(common, eq, out);
        } else if (experiment->parsed()) {
            if (list_presets) {
                for (auto name : preset_names()) {
                    out << name << '\n';
                }
            } else {
                cmd_experiment(common, preset, out);
            }
        } else if (fit_cmd->parsed()) {
            cmd_fit(common, fit, out);
        } else if (resample_cmd->parsed()) {
            cmd_resample(common, resample, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace memswitch::cli
