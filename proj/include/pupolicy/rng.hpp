#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pupolicy {

using Rng = std::mt19937_64;

// splitmix64; used to derive independent stream seeds from one run seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed for a named substream, e.g. derive_seed(seed, "shuffle", epoch).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t index = 0) {
    std::uint64_t s = base;
    for (char ch : tag) {
        s ^= static_cast<std::uint64_t>(static_cast<unsigned char>(ch));
        splitmix64(s);
    }
    s ^= index;
    std::uint64_t state = s;
    return splitmix64(state);
}

}  // namespace pupolicy
