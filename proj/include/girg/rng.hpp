#pragma once

#include <cstdint>
#include <limits>

namespace girg {

// Purposes for independent random streams. Each (seed, tag, index) triple
// addresses its own stream, so generation order never affects values.
enum class StreamTag : std::uint64_t {
    VertexCount = 1,
    Position = 2,
    Weight = 3,
    NaiveEdge = 4,
    GridEdge = 5,
    McdThinning = 6,
    Selection = 7,
    RPrimeCoin = 8,
    CouplingPick = 9,
    StartVertex = 10,
    Experiment = 11,
    Noise = 12,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, StreamTag tag, std::uint64_t i,
                                   std::uint64_t j = 0) noexcept {
    std::uint64_t k = splitmix64(seed ^ 0x6A09E667F3BCC908ULL);
    k = splitmix64(k ^ static_cast<std::uint64_t>(tag));
    k = splitmix64(k ^ i);
    return splitmix64(k ^ (j * 0xD1B54A32D192ED03ULL));
}

// Converts 64 random bits to a double in [0, 1) using the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based generator: a SplitMix64 sequence started at a key derived
/// from (seed, tag, i, j). Models UniformRandomBitGenerator so it can feed
/// the standard distributions.
__extension__ using uint128 = unsigned __int128;

class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr CounterRng(std::uint64_t seed, StreamTag tag, std::uint64_t i, std::uint64_t j = 0) noexcept
        : state_(stream_key(seed, tag, i, j)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    constexpr double uniform() noexcept { return to_unit((*this)()); }

    // Uniform in (0, 1]; safe as a log argument.
    constexpr double uniform_open_zero() noexcept { return 1.0 - uniform(); }

    // Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        uint128 m = static_cast<uint128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<uint128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

} // namespace girg
