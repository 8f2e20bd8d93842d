#include <doctest.h>

#include <cmath>
#include <limits>

#include "memswitch/core.hpp"

using namespace memswitch;

TEST_SUITE("core") {

TEST_CASE("thermal voltage at 300 K") {
    CHECK(thermal_voltage(300.0) == doctest::Approx(0.025851999786435532).epsilon(1e-15));
}

TEST_CASE("default parameters validate and match the model table") {
    const DeviceParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.N == 20000);
    CHECK(p.n_thresh == 10000);
    CHECK(p.g_parallel == 1e-10);
    CHECK(p.V_a == 0.40049);
    CHECK(p.V_off == 0.05);
    CHECK(p.T_bath == 300.0);
    CHECK(p.tau_th == 3.84e-14 * 4e4);
    CHECK(p.R_th == 4e4);
    CHECK(p.c_volatile == 10.0);
    CHECK(p.tau_volatile == 10.0);
    CHECK(p.r_high() == doctest::Approx(1e10));
}

TEST_CASE("validation names the offending field") {
    DeviceParams p;
    p.tau_th = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("tau_th"), ConfigError);
    p = {};
    p.n_thresh = p.N + 1;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("n_thresh"), ConfigError);
    p = {};
    p.g_step = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("g_step"), ConfigError);
}

TEST_CASE("readout is thresholded linear conductance") {
    const DeviceParams p;
    CHECK(readout(12345, p) == doctest::Approx(4264.3905055904027).epsilon(1e-14));
    CHECK(readout(0, p) == doctest::Approx(1e10));
    CHECK(readout(p.n_thresh, p) == doctest::Approx(1e10));
    CHECK(readout(p.N, p) == doctest::Approx(1.0 / (1e-10 + 1e-7 * 10000)));
    CHECK_THROWS_AS((void)readout(-1, p), DomainError);
    CHECK_THROWS_AS((void)readout(p.N + 1, p), DomainError);
}

TEST_CASE("readout is non-increasing in n") {
    const DeviceParams p;
    for (std::int64_t n = 0; n < p.N; n += 7) {
        CHECK(readout(n + 1, p) <= readout(n, p));
    }
}

TEST_CASE("inverse readout round-trips over the active region") {
    const DeviceParams p;
    for (std::int64_t n = p.n_thresh; n <= p.N; n += 13) {
        CHECK(invert_readout(readout(n, p), p) == n);
    }
    CHECK(invert_readout(1e12, p) == p.n_thresh);
    CHECK(invert_readout(1.0, p) == p.N);
    CHECK_THROWS_AS((void)invert_readout(0.0, p), DomainError);
}

TEST_CASE("quantisation boundaries and ties") {
    const DeviceParams p;
    const auto q = build_quantisation(p);
    REQUIRE(q.size() == static_cast<std::size_t>(p.N - p.n_thresh + 1));
    const auto b = q.boundaries();
    REQUIRE(b.size() == q.size() + 1);
    CHECK(std::isinf(b.front()));
    CHECK(b.front() > 0);
    CHECK(std::isinf(b.back()));
    CHECK(b.back() < 0);
    CHECK(b[1] == doctest::Approx(19960079.840319361).epsilon(1e-14));
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        CHECK(b[i] > b[i + 1]);
    }
    // A boundary value belongs to the bin on its low-resistance side.
    CHECK(q.quantise(b[1]).index == 1);
    CHECK(q.quantise(std::nextafter(b[1], 1e300)).index == 0);
    CHECK(q.quantise(1e300).index == 0);
    CHECK(q.quantise(1e-3).index == q.size() - 1);
    CHECK(q.switch_count(5) == p.n_thresh + 5);
    CHECK_THROWS_AS((void)q.quantise(0.0), DomainError);
    CHECK_THROWS_AS((void)q.quantise(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("quantising a representative value is the identity") {
    const DeviceParams p;
    const auto q = build_quantisation(p);
    for (std::size_t i = 0; i < q.size(); i += 97) {
        const auto bin = q.quantise(q.values()[i]);
        CHECK(bin.index == i);
        CHECK(bin.value == q.values()[i]);
    }
}

TEST_CASE("quantisation needs an active region") {
    DeviceParams p;
    p.n_thresh = p.N;
    CHECK_THROWS_AS((void)build_quantisation(p), ConfigError);
}

}
