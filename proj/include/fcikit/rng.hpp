#ifndef FCIKIT_RNG_HPP
#define FCIKIT_RNG_HPP

#include <cstdint>
#include <random>

namespace fcikit {

// splitmix64 finalizer; used to derive decorrelated per-stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream seed for (base_seed, stream_index); stable across platforms.
inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream) {
    return mix64(base_seed + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

// Unbiased draw from [0, bound) via rejection.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t v = rng();
    while (v > limit) v = rng();
    return v % bound;
}

}  // namespace fcikit

#endif
