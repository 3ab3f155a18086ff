#pragma once

#include <cstdint>
#include <random>

namespace driftclass {

// splitmix64; used to turn (seed, tag...) tuples into independent engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, Rest... rest) {
    return derive_seed(splitmix64(seed ^ splitmix64(tag)), rest...);
}

using Rng = std::mt19937_64;

template <typename... Tags>
Rng make_rng(std::uint64_t seed, Tags... tags) {
    return Rng(derive_seed(seed, static_cast<std::uint64_t>(tags)...));
}

// Stable string -> tag mapping for purpose-scoped sub-streams.
inline std::uint64_t purpose_tag(const char* name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* p = name; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace driftclass
