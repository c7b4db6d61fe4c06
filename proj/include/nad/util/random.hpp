#pragma once

#include <cstdint>
#include <random>

namespace nad {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds from one base seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return mix_seed(mix_seed(base) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

// Named streams so that independent consumers of randomness never shift each other.
namespace streams {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t batches = 2;
inline constexpr std::uint64_t abnormal = 3;
inline constexpr std::uint64_t split = 4;
inline constexpr std::uint64_t contamination = 5;
inline constexpr std::uint64_t search = 6;
inline constexpr std::uint64_t sample = 7;
}  // namespace streams

}  // namespace nad
