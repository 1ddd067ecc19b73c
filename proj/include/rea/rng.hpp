#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace rea::rng {

// Counter-based generation: every draw is addressed by a key built from
// (seed, stream, a, b). Regenerating with the same key reproduces the value
// bitwise, independently of call order. This is what makes paths, bridge
// refinements and probe sets pure functions of their parameters.

inline constexpr std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream labels keep independent purposes in disjoint key spaces.
enum Stream : std::uint64_t {
    kIncrement = 0x11,
    kBridge = 0x22,
    kProbe = 0x33,
    kOracle = 0x44,
};

inline constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = splitmix(seed ^ 0x5851f42d4c957f2dULL);
    k = splitmix(k ^ stream);
    k = splitmix(k ^ a);
    k = splitmix(k ^ b);
    return k;
}

// Uniform on (0,1); never returns 0 or 1.
inline double uniform01(std::uint64_t k) {
    return (static_cast<double>(k >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one value per key.
inline double gaussian(std::uint64_t k) {
    const double u1 = uniform01(splitmix(k ^ 0xd1b54a32d192ed03ULL));
    const double u2 = uniform01(splitmix(k ^ 0x8cb92ba72f3d8dd7ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Seed derivation for named purposes (FNV-1a over the label, mixed with root).
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : purpose) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix(splitmix(root) ^ h);
}

} // namespace rea::rng
