#pragma once

#include <cstdint>

namespace stochmatch::rng {

// Counter-based random draws: every sample is a pure function of a
// (seed, replication, unit, kind) key, so simulations are bit-reproducible
// no matter how replications are chunked across worker threads.  The mixer is
// the splitmix64 finalizer (Steele, Lea, Flood), applied once per key word.

enum class Draw : std::uint64_t {
    arrival = 1,     // edge arrival time x_e
    include_y = 2,   // Bernoulli(y_e) inclusion bit Y_e
    attenuate = 3,   // Bernoulli(a~(z_e)) attenuation bit A_e
    activate = 4,    // Bernoulli(p_e) probe outcome
    coin = 5,        // rounding coin per iteration
    pick = 6,        // uniform index choice
    gen_topology = 7,
    gen_weight = 8,
    gen_prob = 9,
    gen_patience = 10,
    gen_misc = 11,
    substream = 12,  // derivation of nested seeds
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t rep, std::uint64_t unit, Draw kind) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);  // domain-separate from raw seeds
    h = splitmix64(h ^ rep);
    h = splitmix64(h ^ unit);
    h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
    return h;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t rep, std::uint64_t unit, Draw kind) {
    return static_cast<double>(mix(seed, rep, unit, kind) >> 11) * 0x1.0p-53;
}

inline bool bernoulli(double p, std::uint64_t seed, std::uint64_t rep, std::uint64_t unit, Draw kind) {
    return uniform01(seed, rep, unit, kind) < p;
}

// Uniform integer in [0, n).  Lemire's multiply-shift; the O(n/2^64) bias is
// far below anything observable at the replication counts used here.
inline std::uint64_t uniform_index(std::uint64_t n, std::uint64_t seed, std::uint64_t rep,
                                   std::uint64_t unit, Draw kind) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(mix(seed, rep, unit, kind)) * static_cast<unsigned __int128>(n);
    return static_cast<std::uint64_t>(wide >> 64);
}

// Derived seed for a nested random process (e.g. one rounding pass inside a
// Monte Carlo replication).
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t rep, std::uint64_t salt = 0) {
    return mix(seed, rep, salt, Draw::substream);
}

}  // namespace stochmatch::rng
