#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace w2w {

// Deterministic, platform-independent generator. std::mt19937 plus the
// standard distributions would tie frozen test values to a particular
// libstdc++; splitmix64 keeps every stream reproducible bit-for-bit and
// doubles as the counter-based mixer used to derive independent
// sub-streams from (seed, index...) tuples.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n); n > 0. Rejection-free modulo is fine here:
    // n is always tiny relative to 2^64, the bias is < n/2^64.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Box-Muller. One value per call, no cached spare, so streams stay
    // position-independent.
    double normal(double mean, double sd) {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

// One splitmix64 scramble step, used as the mixing primitive below.
inline std::uint64_t mix_step(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a tuple of counters. Order
// matters: mix_seed(a, {b}) != mix_seed(b, {a}) in general.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
    std::uint64_t h = mix_step(seed);
    for (std::uint64_t c : counters) h = mix_step(h ^ c);
    return h;
}

} // namespace w2w
