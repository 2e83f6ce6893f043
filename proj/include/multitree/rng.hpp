// Named seedable generator for the randomized suites.
//
// All random choices go through this wrapper instead of the std
// distributions, so that reports are reproducible byte-for-byte from the
// recorded (generator, seed) pair regardless of standard library.

#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace multitree {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    static std::string name() { return "mt19937_64"; }
    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform integer in [0, bound), bound >= 1; rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % bound;
    }

    std::uint64_t in(std::uint64_t lo, std::uint64_t hi) {  // inclusive range
        return lo + below(hi - lo + 1);
    }

    bool coin() { return eng_() & 1u; }

    // Uniform in [0, 1) with 53 bits.
    double real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Exact dyadic mass k/2^6 with k in [1, 64].
    double dyadic_mass() { return static_cast<double>(in(1, 64)) * 0x1.0p-6; }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_;
};

}  // namespace multitree
