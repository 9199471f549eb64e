#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace shufflelab {

// 64-bit mix finalizer of SplitMix64 (Steele, Lea, Flood 2014; public domain).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from (seed, index). Used for per-epoch,
// per-trial and per-grid-point sub-streams so generation order never matters.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

// SplitMix64: counter-based generator — the state advances by a fixed gamma and
// each output is a pure function of the counter. Reproducible across platforms,
// unlike std:: distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]: keeps log finite
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

// In-place Fisher-Yates shuffle.
template <typename T>
void fisher_yates(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

// First `prefix` entries of a fresh uniform permutation of {0..n-1}; the rest of
// the permutation is never materialized (partial Fisher-Yates).
inline void partial_permutation(std::vector<int>& scratch, int n, int prefix, SplitMix64& rng) {
    scratch.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) scratch[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < prefix; ++i) {
        int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
    }
}

}  // namespace shufflelab
