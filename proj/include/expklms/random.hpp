#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace expklms {

// SplitMix64 finalizer; decorrelates adjacent integer seeds before they reach
// the Mersenne Twister state.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic, single-owner random stream. Two streams built from the same
// seed produce identical sequences.
class RandomStream {
public:
    using engine_type = std::mt19937_64;

    explicit RandomStream(std::uint64_t seed) : seed_(seed) {
        std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)),
                          static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                          static_cast<std::uint32_t>(splitmix64(seed ^ 0xA5A5A5A5ULL)),
                          static_cast<std::uint32_t>(splitmix64(seed ^ 0xA5A5A5A5ULL) >> 32)};
        engine_.seed(seq);
    }

    RandomStream(const RandomStream&) = delete;
    RandomStream& operator=(const RandomStream&) = delete;
    RandomStream(RandomStream&&) = default;
    RandomStream& operator=(RandomStream&&) = default;

    std::uint64_t seed() const noexcept { return seed_; }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n >= 1.
    std::size_t uniform_index(std::size_t n) noexcept {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    double normal() { return normal_(engine_); }

    engine_type& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace expklms
