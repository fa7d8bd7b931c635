#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace lqm {

/// Small deterministic generator (splitmix64). Used wherever reproducibility
/// across runs and platforms matters; byte-identical streams for equal seeds.
struct Rng {
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;

    explicit Rng(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal pair (Box-Muller).
    std::pair<double, double> gaussian_pair();

    double gaussian() { return gaussian_pair().first; }

    /// Stream for an independent block; equal (seed, index) gives equal streams.
    static Rng for_block(std::uint64_t seed, std::uint64_t block_index) {
        Rng mix(seed);
        mix.state ^= (block_index + 1) * 0xd1342543de82ef95ULL;
        mix.next();
        return mix;
    }
};

inline std::pair<double, double> Rng::gaussian_pair() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double w = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(w), r * std::sin(w)};
}

} // namespace lqm
