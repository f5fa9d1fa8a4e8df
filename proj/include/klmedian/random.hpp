#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace klmedian {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_interval(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

/// Counter-based stream: draw i of stream (seed, tag) depends only on (seed, tag, i),
/// so every draw index owns an independent substream.
class SubstreamSampler {
public:
    SubstreamSampler(std::uint64_t seed, std::uint64_t tag) : key_(splitmix64(seed ^ splitmix64(tag))) {}

    std::uint64_t bits(std::uint64_t index) const { return splitmix64(key_ ^ splitmix64(index + 1)); }
    double uniform(std::uint64_t index) const { return unit_interval(bits(index)); }
    /// Uniform integer in [0, n), by multiply-shift on the high bits.
    std::uint64_t below(std::uint64_t index, std::uint64_t n) const {
        return std::uint64_t((static_cast<unsigned __int128>(bits(index)) * n) >> 64);
    }

private:
    std::uint64_t key_;
};

/// Sequential generator with platform-independent conversions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t bits() { return engine_(); }
    double uniform() { return unit_interval(engine_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }
    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace klmedian
