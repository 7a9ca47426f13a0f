#pragma once

#include <cstdint>
#include <random>

namespace chainsim {

// SplitMix64 step; used to mix seeds and indices into decorrelated streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and stream indices.
// Trial results depend only on the derived seed, never on execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(base ^ 0x243f6a8885a308d3ull);
    s = splitmix64(s ^ splitmix64(a));
    s = splitmix64(s ^ splitmix64(b ^ 0x13198a2e03707344ull));
    s = splitmix64(s ^ splitmix64(c ^ 0xa4093822299f31d0ull));
    return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace chainsim
