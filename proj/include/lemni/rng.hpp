#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace lemni {

/// SplitMix64 finalizer. Bijective on 64-bit words, full avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Counter-based generator: the i-th output is mix64(key + (i+1) * golden).
///
/// The whole stream is a pure function of the key, so a stream can be
/// reconstructed from (seed, counter) and no state is shared between trials.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    constexpr std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * kGolden);
    }

    /// Uniform on (0, 1], 53-bit resolution; never returns 0 so log() is safe.
    constexpr double next_open_unit() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Box-Muller pair of independent standard normals, consuming two words.
    std::pair<double, double> next_normal_pair() noexcept {
        const double u1 = next_open_unit();
        const double u2 = next_open_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace lemni
