#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "memswitch/engine.hpp"

using namespace memswitch;

namespace {

SimConfig quick(double duration) {
    SimConfig c;
    c.duration = duration;
    return c;
}

// Small device with fast rates: tens of events per second.
DeviceParams small_device() {
    DeviceParams p;
    p.N = 10;
    p.n_thresh = 0;
    p.V_a = 0.025;
    p.V_off = 0.05;
    return p;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("exponential sampling") {
    CHECK(exponential_quantile(2.0, 0.5) == doctest::Approx(std::log(2.0) / 2.0));
    CHECK(exponential_quantile(0.0, 0.5) == kNever);
    CHECK_THROWS_AS((void)exponential_quantile(-1.0, 0.5), DomainError);
    RngStream rng(1);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double x = sample_exponential(4.0, rng);
        CHECK(x > 0.0);
        sum += x;
    }
    CHECK(sum / 20000 == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("seed derivation is fixed") {
    CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(derive_seed(5, 3) == mix64(6));
    RngStream a(42);
    RngStream b(42);
    for (int i = 0; i < 10; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("config validation") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.duration = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.record_policy = RecordPolicy::sampled;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.record_period = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.record_period = 1.0;
    CHECK_NOTHROW(c.validate());
    c = {};
    c.refresh_period = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.initial_resistance = 0.0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("enum names round-trip") {
    for (auto k : {EventKind::up, EventKind::down, EventKind::signal, EventKind::refresh}) {
        CHECK(event_kind_from_string(to_string(k)) == k);
    }
    for (auto p : {RecordPolicy::all_events, RecordPolicy::switching_only, RecordPolicy::sampled}) {
        CHECK(record_policy_from_string(to_string(p)) == p);
    }
    for (auto d : {VolatilityDrive::voltage, VolatilityDrive::power}) {
        CHECK(volatility_drive_from_string(to_string(d)) == d);
    }
    CHECK_THROWS_AS((void)record_policy_from_string("some"), ConfigError);
}

TEST_CASE("trajectory invariants") {
    const auto p = small_device();
    SimConfig c = quick(20.0);
    c.initial_resistance = readout(10, p);
    c.record_policy = RecordPolicy::all_events;
    c.refresh_period = 0.5;
    const auto t = simulate(c, p, PiecewiseSignal::constant(0.0, 20.0), 9);
    REQUIRE(t.size() > 10);
    CHECK(t.times.front() == 0.0);
    CHECK(t.n_values.front() == 10);
    CHECK(t.times.back() == 20.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        CHECK(t.times[i] >= t.times[i - 1]);
        const auto dn = t.n_values[i] - t.n_values[i - 1];
        CHECK(std::abs(dn) <= 1);
        CHECK(t.n_values[i] >= 0);
        CHECK(t.n_values[i] <= p.N);
        CHECK(t.resistances[i] == readout(t.n_values[i], p));
        switch (t.event_kinds[i]) {
            case EventKind::up: CHECK(dn == -1); break;
            case EventKind::down: CHECK(dn == 1); break;
            default: CHECK(dn == 0); break;
        }
    }
}

TEST_CASE("same seed, same trajectory; different seed, different trajectory") {
    const auto p = small_device();
    SimConfig c = quick(10.0);
    c.initial_resistance = readout(10, p);
    const auto s = PiecewiseSignal::constant(0.0, 10.0);
    CHECK(simulate(c, p, s, 4) == simulate(c, p, s, 4));
    CHECK_FALSE(simulate(c, p, s, 4) == simulate(c, p, s, 5));
}

TEST_CASE("refresh ticks are recorded only under all_events") {
    const auto p = small_device();
    SimConfig c = quick(5.0);
    c.initial_resistance = readout(10, p);
    c.refresh_period = 0.25;
    c.record_policy = RecordPolicy::all_events;
    const auto s = PiecewiseSignal::constant(0.0, 5.0);
    const auto all = simulate(c, p, s, 1);
    c.record_policy = RecordPolicy::switching_only;
    const auto switching = simulate(c, p, s, 1);
    const auto refreshes = std::count(all.event_kinds.begin(), all.event_kinds.end(),
                                      EventKind::refresh);
    CHECK(refreshes >= 19);
    // Refresh ticks do not consume random numbers, so the switching events agree.
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all.event_kinds[i] == EventKind::up || all.event_kinds[i] == EventKind::down) {
            a.push_back(all.times[i]);
        }
    }
    for (std::size_t i = 0; i < switching.size(); ++i) {
        if (switching.event_kinds[i] == EventKind::up ||
            switching.event_kinds[i] == EventKind::down) {
            b.push_back(switching.times[i]);
        }
    }
    CHECK(a.size() == b.size());
}

TEST_CASE("event counts match recorded events") {
    const auto p = small_device();
    SimConfig c = quick(5.0);
    c.initial_resistance = readout(10, p);
    c.refresh_period = 1.0;
    c.record_policy = RecordPolicy::all_events;
    Simulator sim(p, c, PiecewiseSignal({0.0, 2.0, 5.0}, {0.0, 0.01}), 3);
    const auto t = sim.run();
    const auto ups = std::count(t.event_kinds.begin() + 1, t.event_kinds.end(), EventKind::up);
    const auto downs = std::count(t.event_kinds.begin() + 1, t.event_kinds.end(), EventKind::down);
    CHECK(sim.counts().up == static_cast<std::size_t>(ups));
    CHECK(sim.counts().down == static_cast<std::size_t>(downs));
    // Breakpoints at 2 and 5; the tick at 2 coincides with the signal event and
    // is absorbed by it.
    CHECK(sim.counts().signal == 2);
    CHECK(sim.counts().refresh == 3);
}

TEST_CASE("terminal record kind") {
    DeviceParams p;
    SimConfig c = quick(100.0);
    const auto ends_with_signal = simulate(c, p, PiecewiseSignal::constant(0.0, 100.0), 1);
    CHECK(ends_with_signal.event_kinds.back() == EventKind::signal);
    CHECK(ends_with_signal.times.back() == 100.0);
    const auto short_signal = simulate(c, p, PiecewiseSignal::constant(0.0, 50.0), 1);
    CHECK(short_signal.event_kinds.back() == EventKind::refresh);
    CHECK(short_signal.times.back() == 100.0);
}

TEST_CASE("zero-rate states are absorbing") {
    DeviceParams p = small_device();
    SimConfig c = quick(100.0);
    c.initial_resistance = readout(0, p);
    // Drive hard positive: only up events remain possible and n = 0 is absorbing.
    const auto t = simulate(c, p, PiecewiseSignal::constant(5.0, 100.0), 2);
    CHECK(t.n_values.back() == 0);
    CHECK(t.size() == 2);
}

TEST_CASE("sampled policy gives a uniform grid plus the end") {
    const auto p = small_device();
    SimConfig c = quick(10.0);
    c.initial_resistance = readout(10, p);
    c.record_policy = RecordPolicy::sampled;
    c.record_period = 0.5;
    const auto s = PiecewiseSignal::constant(0.0, 10.0);
    const auto sampled = simulate(c, p, s, 8);
    REQUIRE(sampled.size() == 21);
    for (std::size_t k = 0; k < sampled.size(); ++k) {
        CHECK(sampled.times[k] == doctest::Approx(0.5 * static_cast<double>(k)));
    }
    c.record_policy = RecordPolicy::all_events;
    const auto full = simulate(c, p, s, 8);
    const auto held = resample_uniform(full, 0.5, 10.0);
    for (std::size_t k = 0; k < sampled.size(); ++k) {
        CHECK(static_cast<double>(sampled.n_values[k]) == held.n_values[k]);
    }
}

TEST_CASE("joule heating and volatility move toward their targets") {
    DeviceParams p;
    p.tau_th = 1.0;
    SimConfig c = quick(50.0);
    c.joule_heating = true;
    c.volatility = true;
    c.refresh_period = 1.0;
    c.initial_resistance = 1e4;
    c.record_policy = RecordPolicy::all_events;
    const auto t = simulate(c, p, PiecewiseSignal::constant(0.05, 50.0), 5);
    CHECK(t.temperatures.back() > 300.0);
    CHECK(t.rhos.back() == doctest::Approx(p.c_volatile * 0.05).epsilon(0.02));
}

TEST_CASE("series resistance divides the input") {
    DeviceParams p;
    SimConfig c = quick(1.0);
    c.series_resistance = 1e4;
    c.initial_resistance = readout(invert_readout(1e4, p), p);
    Simulator sim(p, c, PiecewiseSignal::constant(0.2, 1.0), 1);
    double seen = -1.0;
    sim.set_probe([&](const RateEvaluation& e) {
        if (seen < 0.0) {
            seen = e.device_voltage / e.input_voltage;
        }
    });
    (void)sim.run();
    const double r = c.initial_resistance;
    CHECK(seen == doctest::Approx(r / (r + 1e4)));
}

TEST_CASE("sample and hold") {
    const std::vector<double> t{0.0, 2.5, 2.5, 4.0};
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto out = resample_hold(t, v, 1.0, 5.0);
    CHECK(out == std::vector<double>{1.0, 1.0, 1.0, 3.0, 4.0, 4.0});
    CHECK(resample_hold(t, v, 1.0, 0.0) == std::vector<double>{1.0});
    CHECK(resample_hold(t, v, 2.0, 3.0).size() == 2);
    CHECK_THROWS_AS((void)resample_hold(t, v, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)resample_hold(t, v, 1.0, -1.0), DomainError);
}

TEST_CASE("resampling is idempotent on its own grid") {
    const auto p = small_device();
    SimConfig c = quick(10.0);
    c.initial_resistance = readout(10, p);
    const auto traj = simulate(c, p, PiecewiseSignal::constant(0.0, 10.0), 3);
    const auto once = resample_uniform(traj, 0.5, 10.0);
    const auto twice = resample_hold(once.times, once.n_values, 0.5, 10.0);
    CHECK(twice == once.n_values);
}

TEST_CASE("quantile interpolation") {
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0}, 0.25) == doctest::Approx(1.25));
    CHECK(quantile({5.0}, 0.9) == 5.0);
}

TEST_CASE("ensemble statistics are independent of the thread count") {
    const auto p = small_device();
    SimConfig c = quick(5.0);
    c.initial_resistance = readout(10, p);
    const auto s = PiecewiseSignal::constant(0.0, 5.0);
    EnsembleOptions o;
    o.n_runs = 40;
    o.master_seed = 17;
    o.threads = 1;
    const auto one = run_ensemble(c, p, s, o);
    o.threads = 3;
    const auto three = run_ensemble(c, p, s, o);
    CHECK(one.mean_n == three.mean_n);
    CHECK(one.quantiles_r == three.quantiles_r);
    CHECK(one.final_n == three.final_n);
    CHECK(one.grid.size() == 101);
    CHECK(one.n_runs == 40);
    // Run i uses the derived seed i.
    const auto run7 = simulate(c, p, s, derive_seed(17, 7));
    CHECK(one.final_n[7] == static_cast<double>(run7.n_values.back()));
}

TEST_CASE("ensemble relaxes to the equilibrium mean") {
    const auto p = small_device();
    SimConfig c = quick(20.0);
    c.initial_resistance = readout(10, p);
    EnsembleOptions o;
    o.n_runs = 400;
    o.master_seed = 1;
    o.threads = 1;
    const auto stats = run_ensemble(c, p, PiecewiseSignal::constant(0.0, 20.0), o);
    const double n_eq = equilibrium_n(0.0, 300.0, 0.0, p);
    // Binomial(N, n_eq/N) standard error over 400 runs.
    const double se = std::sqrt(n_eq * (1.0 - n_eq / p.N) / 400.0);
    CHECK(std::abs(stats.mean_final_n - n_eq) < 5.0 * se);
}

}
