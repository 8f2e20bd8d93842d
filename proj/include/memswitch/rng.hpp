#pragma once

#include <cstdint>
#include <random>

namespace memswitch {

/// SplitMix64 finaliser. Used to decorrelate seeds before they reach the
/// generator.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of run `index` in an ensemble: mix64(master ^ index).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ index);
}

/// Deterministic random stream: std::mt19937_64 seeded with mix64(seed).
///
/// Uniform variates are built from the top 53 bits of each draw rather than
/// through <random> distributions, whose algorithms are implementation-defined,
/// so a given seed yields the same stream on every conforming platform.
class RngStream {
public:
    using result_type = std::mt19937_64::result_type;

    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform on (0, 1): k / 2^53 offset by half a step, never 0 or 1.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // UniformRandomBitGenerator, for <random> distributions in oracle code.
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace memswitch
