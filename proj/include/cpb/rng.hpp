#pragma once
#include <cstdint>
#include <random>

namespace cpb {

using Rng = std::mt19937_64;

// SplitMix64 step, used to derive independent stream seeds from a master
// seed plus labels. mt19937_64 and this mixer are both fully specified,
// so identical seeds give identical streams everywhere.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0xd1342543de82ef95ULL;
    h ^= splitmix64(s);
    s ^= b * 0xaf251af3b0f025b5ULL;
    h ^= splitmix64(s);
    return h;
}

// Uniform in [0,1) with 53 random bits. std::uniform_real_distribution is
// implementation-defined, so we do not use it.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cpb
