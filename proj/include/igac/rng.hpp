/**
 * @file rng.hpp
 * @brief Counter-based generator: the i-th draw is a pure function of (key, i).
 */
#pragma once

#include <cstdint>

namespace igac {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of ensemble member k.
[[nodiscard]] constexpr std::uint64_t member_seed(std::uint64_t seed, std::uint64_t k) noexcept {
    return seed ^ (k * golden_gamma);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    [[nodiscard]] std::uint64_t at(std::uint64_t counter) const noexcept {
        return mix64(key_ + (counter + 1) * golden_gamma);
    }
    std::uint64_t next() noexcept { return at(counter_++); }

    /// Uniform on (0, 1).
    double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by Box-Muller (one variate per two draws).
    double normal() noexcept;

    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace igac
