#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace goerw {

// splitmix64 finalizer. Used both as a stream generator and as the mixing
// function for key-addressed (counter-based) variates.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
    return mix64(h ^ mix64(v));
}

/// Seed for the `index`-th independent trial under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return hash_combine(mix64(master ^ 0x5eed5eed5eed5eedULL), index);
}

/// Uniform in (0, 1]; never returns 0 so -log(u) is finite.
constexpr double to_unit_open_closed(std::uint64_t bits) noexcept {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Uniform in [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Small sequential generator (splitmix64 stream). Satisfies
/// UniformRandomBitGenerator so it can feed <random> distributions, but the
/// library only uses `uniform()` to stay byte-reproducible across standard
/// library implementations.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return to_unit((*this)()); }

private:
    std::uint64_t state_;
};

}  // namespace goerw
