#pragma once

#include <cstdint>
#include <random>

namespace collapse {

// Deterministic random source. All variate transforms are implemented here
// (rather than via std:: distributions) so that a given seed yields the same
// draw sequence on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0, 1]: 53-bit mantissa, never zero.
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on [-1, 1).
    double uniform_sym() { return 2.0 * uniform01() - 1.0; }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_below(std::uint64_t n);

    // Standard normal via Box-Muller.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // exp(N(mu, sigma)); mu and sigma are the underlying normal parameters.
    double lognormal(double mu, double sigma);

    // Standard Student-t draw via Bailey's polar method.
    double student_t(double df);

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used for stable seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive stable combiner for deriving per-run seeds.
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);

}  // namespace collapse
