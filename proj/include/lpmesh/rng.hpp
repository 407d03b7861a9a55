#pragma once

#include <cmath>
#include <cstdint>

namespace lpmesh {

// Deterministic generator used everywhere randomness is needed. Same seed,
// same build -> same stream; the simulator's byte-identical-trace contract
// rests on this, so no std::*_distribution (their algorithms are
// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n); n > 0
    std::uint32_t uniform_u32(std::uint32_t n) {
        return static_cast<std::uint32_t>(next() % n);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    double gaussian(double mean, double sigma) {
        // Box-Muller, one draw per call (second value discarded for stream
        // stability across call sites).
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * M_PI * u2);
    }

    // Derive a decorrelated child stream (per node, per purpose, ...).
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

} // namespace lpmesh
