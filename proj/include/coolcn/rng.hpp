#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace coolcn {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a, also used for output-file content hashes in the manifest.
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Named child stream of a master seed. All randomness in the project flows
// from one master seed through these named streams.
inline std::uint64_t child_seed(std::uint64_t master, std::string_view stream) {
    return splitmix64(splitmix64(master) ^ fnv1a(stream));
}

inline Rng make_rng(std::uint64_t master, std::string_view stream) {
    return Rng(child_seed(master, stream));
}

}  // namespace coolcn
