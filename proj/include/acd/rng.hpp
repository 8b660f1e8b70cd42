#pragma once

#include <cstdint>
#include <random>

namespace acd {

/*
    Seedable generator with a stable cross-platform stream.

    The engine is std::mt19937_64, whose output sequence is fixed by the
    standard. The distribution helpers below are written out by hand because
    the standard library's distributions are implementation-defined.
*/
class Rng {
public:
    static constexpr std::uint64_t default_seed = 42;

    explicit Rng(std::uint64_t seed = default_seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    // Number of 64-bit words consumed since construction.
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64()
    {
        ++counter_;
        return engine_();
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via the Box-Muller transform; caches the second variate.
    double normal();

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace acd
