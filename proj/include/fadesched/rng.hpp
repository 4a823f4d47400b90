// Seeded, splittable random number streams with platform-independent output.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace fadesched {

namespace detail {

// SplitMix64 finalizer. Used to turn structured stream labels into
// well-separated engine seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/**
 * Deterministic random stream.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard, and all variate transforms are spelled out here rather than
 * delegated to std::*_distribution (whose sequences are implementation
 * defined). Identical seeds therefore give bit-identical draws on any
 * platform, which the sweep harness relies on for stable golden files.
 */
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : engine_(detail::mix64(seed)) {}

    /// Independent substream for work unit (a, b) under a master seed.
    /// Labels are hashed through two SplitMix64 rounds, so distinct
    /// (seed, a, b) triples yield unrelated engine states.
    static SplitRng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        const std::uint64_t s = detail::mix64(detail::mix64(seed ^ detail::mix64(a + 1)) ^ detail::mix64(~b));
        return SplitRng(s);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exp(1) variate.
    double exponential() { return -std::log1p(-uniform()); }

    /// Standard circularly-symmetric complex Gaussian, E|w|^2 = 1.
    std::complex<double> complex_gaussian() {
        const double r = std::sqrt(-std::log1p(-uniform()));
        const double t = 2.0 * M_PI * uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }

private:
    std::mt19937_64 engine_;
};

} // namespace fadesched
