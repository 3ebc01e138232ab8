#pragma once

// Splittable seed derivation. Every parallel stream (a Monte-Carlo chunk, a
// level sample) gets its seed from the run seed and its indices, so the
// result does not depend on thread count or scheduling.

#include <cstdint>

namespace qrep {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

}  // namespace qrep
