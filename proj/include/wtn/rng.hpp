#pragma once

#include <cstdint>
#include <random>

namespace wtn::rng {

// mt19937_64's output sequence is fixed by the standard; the helpers below
// avoid std::*_distribution so draws are identical across standard libraries.
using Engine = std::mt19937_64;

// SplitMix64 finalizer; decorrelates (seed, stream) pairs.
constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return mix(mix(master) ^ mix(stream + 0x632BE59BD9B4E019ULL));
}

inline Engine make_engine(std::uint64_t master, std::uint64_t stream) {
    return Engine(derive_seed(master, stream));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, bound), bound > 0; rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Engine& e, std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = e();
    } while (x >= limit);
    return x % bound;
}

// Fisher-Yates.
template <class Container>
void shuffle(Container& items, Engine& e) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(e, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace wtn::rng
