#pragma once

#include <cstdint>
#include <random>

namespace invclt {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// Seedable, splittable generator. A stream is identified by
/// (master seed, stream index); Monte Carlo chunk c always draws from
/// stream c, so results do not depend on how chunks are scheduled.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x9E3779B9u};
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound); bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound) {
        const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % bound;
    }

    double normal() { return std::normal_distribution<double>{}(engine_); }

    std::mt19937_64& engine() { return engine_; }

    Rng split(std::uint64_t stream) const;

private:
    std::mt19937_64 engine_;
};

inline Rng Rng::split(std::uint64_t stream) const {
    // derive from the first output so that split(k) of different parents differ
    Rng copy = *this;
    return Rng(copy.next_u64(), stream);
}

}  // namespace invclt
