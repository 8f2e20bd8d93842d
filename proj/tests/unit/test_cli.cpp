#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "memswitch/cli/commands.hpp"
#include "memswitch/cli/config.hpp"
#include "memswitch/cli/presets.hpp"
#include "memswitch/io.hpp"

using namespace memswitch;
using namespace memswitch::cli;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::vector<const char*> argv{"memswitch"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("memswitch_unit_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

std::vector<Assignment> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "cfg");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("sections, comments and values") {
    const auto a = parse(
        "# header\n"
        "[device]\n"
        "tau_th = 1.5e-9   ; inline\n"
        "\n"
        "[signal]\n"
        "kind = piecewise\n"
        "breakpoints = 0, 10, 20\n"
        "amplitudes = 0.1, 0\n");
    REQUIRE(a.size() == 4);
    CHECK(a[0].key == "device.tau_th");
    CHECK(a[0].value == "1.5e-9");
    CHECK(a[0].where() == "cfg:3");
    RunConfig c;
    apply_and_validate(c, a);
    CHECK(c.device.tau_th == 1.5e-9);
    CHECK(c.signal.source == SignalSource::piecewise);
    CHECK(c.sim.duration == 20.0);
    const auto s = c.make_signal();
    CHECK(s.value_at(5.0) == 0.1);
}

TEST_CASE("unknown keys and sections are rejected at their line") {
    CHECK_THROWS_WITH_AS(parse("[device]\nN = 10\nfoo = 1\n"),
                         doctest::Contains("cfg:3: unknown key 'foo'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("\n[devices]\n"), doctest::Contains("cfg:2: unknown section"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse("N = 1\n"), doctest::Contains("cfg:1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[sim]\nduration 5\n"), doctest::Contains("cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[sim]\n[sim]\n"), doctest::Contains("cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("[sim\n"), doctest::Contains("cfg:1"), ConfigError);
}

TEST_CASE("duplicate keys name both lines") {
    CHECK_THROWS_WITH_AS(parse("[run]\nseed = 1\nruns = 2\nseed = 3\n"),
                         doctest::Contains("cfg:4: duplicate key 'seed' (first set on line 2)"),
                         ConfigError);
}

TEST_CASE("bad values are anchored to their assignment") {
    RunConfig c;
    CHECK_THROWS_WITH_AS(cli::apply(c, parse("[device]\n\nN = ten\n")),
                         doctest::Contains("cfg:3: device.N"), ConfigError);
    RunConfig d;
    CHECK_THROWS_WITH_AS(apply_and_validate(d, parse("[device]\ntau_th = -1\n")),
                         doctest::Contains("cfg:2: device.tau_th"), ConfigError);
    RunConfig e;
    CHECK_THROWS_WITH_AS(cli::apply(e, parse("[sim]\njoule_heating = maybe\n")),
                         doctest::Contains("cfg:2"), ConfigError);
}

TEST_CASE("validation without an assignment still names the field") {
    RunConfig c;
    c.device.n_thresh = c.device.N + 1;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("n_thresh"), ConfigError);
}

TEST_CASE("overrides") {
    const auto a = parse_override("run.seed=42");
    CHECK(a.key == "run.seed");
    CHECK(a.value == "42");
    CHECK(a.where() == "--set");
    CHECK_THROWS_AS((void)parse_override("seed=42"), ConfigError);
    CHECK_THROWS_AS((void)parse_override("run.sed=42"), ConfigError);
    RunConfig c;
    apply_and_validate(c, std::vector<Assignment>{a, parse_override("sim.refresh_period=0.5"),
                           parse_override("sim.refresh_period=none")});
    CHECK(c.run.seed == 42);
    CHECK_FALSE(c.sim.refresh_period.has_value());
}

TEST_CASE("key table") {
    const auto keys = known_keys();
    for (const char* k : {"device.V_a", "sim.record_policy", "signal.kind", "run.seed",
                          "fit.interval", "equilibrium.rho"}) {
        CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
    }
}

}

TEST_SUITE("presets") {

TEST_CASE("frozen switching table") {
    namespace pv = preset_values;
    const auto& t = pv::kSwitching;
    CHECK(t[0].kind == SignalKind::pulse_train_ascending);
    CHECK(t[0].max_amplitude == -0.2);
    CHECK(t[0].pulse_step == -0.01);
    CHECK(t[1].kind == SignalKind::pulse_train_descending);
    CHECK(t[1].max_amplitude == -0.2);
    CHECK(t[2].max_amplitude == 0.2);
    CHECK(t[2].pulse_step == 0.01);
    CHECK(t[3].kind == SignalKind::pulse_train_descending);
    CHECK(t[3].max_amplitude == 0.07);
    CHECK(t[4].kind == SignalKind::alternating);
    CHECK(t[4].max_amplitude == 0.5);
    CHECK(t[4].duty_cycle == 0.001);
    for (const auto& row : t) {
        CHECK(row.pulse_duration == 1000.0);
    }
    CHECK(pv::kSwitchingMinResistance == 1e4);
    CHECK(pv::kSwitchingMaxResistance == 1e5);
    CHECK(pv::kFrequencyCVolatile == 500.0);
    CHECK(pv::kFrequencies == std::array<double, 3>{0.5, 1.0, 2.0});
    CHECK(pv::kFrequencyPulseWidth == 0.1);
    CHECK(pv::kFrequencyDuration == 100.0);
    CHECK(pv::kSpikingGStep == 1e-8);
    CHECK(pv::kSpikingGParallel == 1e-6);
    CHECK(pv::kSpikingN == 1000000);
    CHECK(pv::kSpikingNThresh == 800000);
    CHECK(pv::kSpikingVa == 1.0);
    CHECK(pv::kSpikingVoff == -0.8);
}

TEST_CASE("every preset yields valid variants") {
    for (auto name : preset_names()) {
        const auto preset = preset_from_string(name);
        CHECK(to_string(preset) == name);
        const auto variants = preset_variants(preset, preset_config(preset));
        CHECK_FALSE(variants.empty());
        for (const auto& v : variants) {
            CHECK_NOTHROW(v.config.validate());
            CHECK_NOTHROW((void)v.config.make_signal());
        }
    }
    CHECK_THROWS_WITH_AS((void)preset_from_string("nope"), doctest::Contains("known:"),
                         ConfigError);
}

TEST_CASE("sweep labels and values") {
    const auto sw = preset_variants(Preset::switching_positive_ascending,
                                    preset_config(Preset::switching_positive_ascending));
    REQUIRE(sw.size() == 5);
    CHECK(sw.front().label == "R0_10000");
    CHECK(sw.back().label == "R0_100000");
    CHECK(sw.front().config.sim.duration == doctest::Approx(20000.0));
    const auto fr = preset_variants(Preset::frequency_potentiation,
                                    preset_config(Preset::frequency_potentiation));
    REQUIRE(fr.size() == 3);
    CHECK(fr[0].label == "f_0.5");
    CHECK(fr[2].config.signal.spec.period == 0.5);
    CHECK(fr[2].config.signal.spec.duty_cycle == doctest::Approx(0.2));
    CHECK(fr[2].config.sim.duration == 100.0);
}

TEST_CASE("log spacing") {
    const auto v = log_spaced(1e4, 1e5, 5);
    CHECK(v.front() == 1e4);
    CHECK(v.back() == 1e5);
    CHECK(v[2] == doctest::Approx(std::sqrt(1e9)));
    CHECK(log_spaced(3.0, 9.0, 1) == std::vector<double>{3.0});
    CHECK_THROWS_AS((void)log_spaced(0.0, 1.0, 3), DomainError);
}

TEST_CASE("excursion counting") {
    const std::vector<double> flat(20, 1.0);
    CHECK(count_excursions(flat, 5.0) == 0);
    std::vector<double> spikes(40, 1.0);
    spikes[3] = 10.0;
    spikes[4] = 12.0;
    spikes[20] = 9.0;
    spikes[30] = 6.0;
    CHECK(count_excursions(spikes, 5.0) == 3);
    std::vector<double> starts_high(10, 1.0);
    starts_high[0] = 50.0;
    CHECK(count_excursions(starts_high, 5.0) == 0);
}

TEST_CASE("positive ascending pulses raise the mean resistance") {
    RunConfig base = preset_config(Preset::switching_positive_ascending);
    base.run.runs = 100;
    base.run.threads = 1;
    auto variants = preset_variants(Preset::switching_positive_ascending, base);
    const auto& c = variants.front().config;
    EnsembleOptions o;
    o.n_runs = 100;
    o.master_seed = 1;
    o.threads = 1;
    o.grid_period = c.run.grid_period;
    const auto stats = run_ensemble(c.sim, c.device, c.make_signal(), o);
    CHECK(stats.mean_final_r > c.sim.initial_resistance);
}

TEST_CASE("spiking preset produces current excursions") {
    const auto dir = scratch("spiking");
    const auto r = run({"experiment", "spiking", "--runs", "2", "--seed", "1", "--out",
                        dir.string(), "--set", "run.per_run_files=false"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "experiment.json"));
    const auto& v = j["variants"][0];
    CHECK(v["runs_with_excursion"].get<int>() >= 1);
    for (const auto& e : v["excursions"]) {
        CHECK(e.get<int>() >= 1);
    }
}
}

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2, help exits 0") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"bogus"}).code == kExitUsage);
    CHECK(run({"simulate", "--no-such-flag"}).code == kExitUsage);
    CHECK(run({"simulate", "--config", "/nonexistent/file.ini"}).code == kExitUsage);
    CHECK(run({"simulate", "--runs", "0"}).code == kExitUsage);
    CHECK(run({"simulate", "--set", "device.bogus=1"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
    const auto list = run({"experiment", "--list"});
    CHECK(list.code == kExitOk);
    CHECK(list.out.find("spiking") != std::string::npos);
}

TEST_CASE("config errors reach stderr with their location") {
    const auto dir = scratch("cfgerr");
    write(dir / "bad.ini", "[device]\nN = 100\nwhat = 1\n");
    const auto r = run({"simulate", "--config", (dir / "bad.ini").string(), "--out", dir.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("bad.ini:3") != std::string::npos);
}

TEST_CASE("model errors exit 1") {
    const auto dir = scratch("model");
    // One pair cannot fill a bin, so the fit is infeasible.
    write(dir / "d.csv", "device_id,t_seconds,resistance_ohm\na,0,100\na,10,100\n");
    const auto r = run({"fit", (dir / "d.csv").string(), "--interval", "10", "--out",
                        dir.string(), "--set", "fit.min_pairs_per_bin=5"});
    CHECK(r.code == kExitRuntime);
}

TEST_CASE("equilibrium default device") {
    const auto r = run({"equilibrium", "--json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"][0]["n_eq_rounded"] == 2526);
    CHECK(j["rows"][0]["R_eq"] == 1e10);
    const auto many = run({"equilibrium", "--json", "--rho", "0,1,2"});
    CHECK(nlohmann::json::parse(many.out)["rows"].size() == 3);
}

TEST_CASE("simulate writes a trajectory and a summary") {
    const auto dir = scratch("sim");
    const auto r = run({"simulate", "--seed", "7", "--out", dir.string(), "--set",
                        "sim.duration=1000", "--set", "device.V_a=0.3"});
    REQUIRE(r.code == kExitOk);
    std::ifstream in(dir / "trajectory.csv");
    const auto t = io::read_trajectory_csv(in);
    CHECK(t.times.back() == 1000.0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["seed"] == 7);
    CHECK(summary["records"] == t.size());
    CHECK(summary["final"]["n"] == t.n_values.back());
    CHECK_FALSE(fs::exists(dir / "ensemble.json"));
    const auto again = scratch("sim2");
    REQUIRE(run({"simulate", "--seed", "7", "--out", again.string(), "--set",
                 "sim.duration=1000", "--set", "device.V_a=0.3"})
                .code == kExitOk);
    CHECK(slurp(dir / "trajectory.csv") == slurp(again / "trajectory.csv"));
    CHECK(slurp(dir / "summary.json") == slurp(again / "summary.json"));
}

TEST_CASE("simulate with several runs writes the ensemble document") {
    const auto dir = scratch("ens");
    REQUIRE(run({"simulate", "--runs", "4", "--out", dir.string(), "--set", "sim.duration=100"})
                .code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "ensemble.json"));
    CHECK(j["n_runs"] == 4);
    CHECK(j["grid"].size() == 101);
}

TEST_CASE("fit of a constant device gives zero drift") {
    const auto dir = scratch("fitconst");
    const DeviceParams p;
    std::ostringstream csv;
    csv << "device_id,t_seconds,resistance_ohm\n";
    for (int d = 0; d < 3; ++d) {
        for (int k = 0; k <= 10; ++k) {
            csv << "dev" << d << ',' << 1e4 * k << ',' << io::format_double(readout(12000, p))
                << '\n';
        }
    }
    write(dir / "const.csv", csv.str());
    const auto r = run({"fit", (dir / "const.csv").string(), "--out", dir.string(), "--json"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "fit_report.json"));
    CHECK(std::abs(j["a"].get<double>()) < 1e-5);
    CHECK(j["n_pairs"] == 30);
    CHECK(j["bins_used"] == 1);
    CHECK(j["V_a"].is_null());
    CHECK(j.contains("params_hash"));
}

TEST_CASE("fit rejects an interval that is not a whole number of samples") {
    const auto dir = scratch("fitint");
    write(dir / "d.csv",
          "device_id,t_seconds,resistance_ohm\na,0,10000\na,10,10000\na,20,10000\n");
    const auto r = run({"fit", (dir / "d.csv").string(), "--interval", "15", "--out",
                        dir.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("whole multiple") != std::string::npos);
}

TEST_CASE("resample: zero total, idempotence, uniform input") {
    const auto dir = scratch("resample");
    write(dir / "traj.csv",
          "t,n,R,T,rho,event\n0,10000,1e10,300,0,refresh\n2.5,10001,1e7,300,0,down\n");
    const auto zero = dir / "zero";
    REQUIRE(run({"resample", (dir / "traj.csv").string(), "--period", "1", "--total", "0",
                 "--out", zero.string()})
                .code == kExitOk);
    CHECK(slurp(zero / "uniform.csv") == "t,n,R,T,rho\n0,10000,1e+10,300,0\n");

    const auto first = dir / "first";
    REQUIRE(run({"resample", (dir / "traj.csv").string(), "--period", "1", "--total", "4",
                 "--out", first.string()})
                .code == kExitOk);
    CHECK(slurp(first / "uniform.csv") ==
          "t,n,R,T,rho\n0,10000,1e+10,300,0\n1,10000,1e+10,300,0\n"
          "2,10000,1e+10,300,0\n3,10001,1e+07,300,0\n4,10001,1e+07,300,0\n");
    const auto second = dir / "second";
    REQUIRE(run({"resample", (first / "uniform.csv").string(), "--period", "1", "--total", "4",
                 "--out", second.string()})
                .code == kExitOk);
    CHECK(slurp(first / "uniform.csv") == slurp(second / "uniform.csv"));
    CHECK(run({"resample", (dir / "traj.csv").string(), "--period", "0", "--out", dir.string()})
              .code == kExitUsage);
}

TEST_CASE("experiment writes per-variant documents") {
    const auto dir = scratch("exp");
    const auto r = run({"experiment", "hysteresis", "--runs", "2", "--seed", "3", "--out",
                        dir.string()});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(slurp(dir / "experiment.json"));
    CHECK(j["variants"].size() == 1);
    CHECK(fs::exists(dir / "ensemble_default.json"));
    CHECK(fs::exists(dir / "default" / "run_0000.csv"));
    CHECK(slurp(dir / "default" / "run_0000.csv").rfind("t,V,I,R\n", 0) == 0);
    CHECK(run({"experiment", "no_such", "--out", dir.string()}).code == kExitUsage);
    CHECK(run({"experiment", "--out", dir.string()}).code == kExitUsage);
}

}
