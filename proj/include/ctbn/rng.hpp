#pragma once

#include <cmath>
#include <cstdint>

namespace ctbn {

/// SplitMix64 finalizer. Used both as the output function of the generator
/// below and to derive independent sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic sub-seed for replicate `index` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// Counter-based 64-bit generator (SplitMix64): output k is mix64(seed + k*gamma).
/// Same stream on every platform, unlike the std:: distributions.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Exponential(rate) by inverse CDF.
    double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

    /// Uniform integer in [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    bool coin() noexcept { return ((*this)() >> 63) != 0; }

private:
    std::uint64_t state_;
};

} // namespace ctbn
