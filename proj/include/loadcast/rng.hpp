#pragma once

#include <cstdint>
#include <cmath>

namespace loadcast {

// Deterministic 64-bit generator used everywhere randomness is needed.
//
// Core: SplitMix64 (Steele, Lea & Flood 2014) -- a counter-based generator
// whose state advances by the golden-ratio increment and whose output is a
// 64-bit finalizer hash of the state. Streams are split by hashing a stream
// id into the state, so (seed, id...) always names the same sequence on
// every platform. Only integer arithmetic and IEEE double division are
// used, so sequences are reproducible bit for bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream from this generator's current state.
    // Does not advance the parent. stream(a).stream(b) != stream(b).stream(a).
    Rng stream(std::uint64_t id) const {
        return Rng(mix(state_ ^ mix(id + kGamma)));
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    // Unbiased integer in [0, n) via rejection sampling, n >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t lim = n * ((~std::uint64_t{0}) / n);
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= lim);
        return r % n;
    }

    // Standard normal via Box-Muller; two draws per call, no cached spare.
    double next_normal() {
        double u1 = next_unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace loadcast
