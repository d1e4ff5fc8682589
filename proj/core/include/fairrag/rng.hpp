#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace fairrag {

// All stochastic code in this library draws from a caller-owned mt19937_64
// through the helpers below, so a (seed, call sequence) pair fully determines
// every sampled ranking regardless of standard-library distribution internals.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 bits of precision.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Draws an index proportionally to the given non-negative weights.
inline std::size_t weighted_index(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("weighted_index: total weight must be positive");
    }
    const double u = uniform01(rng) * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        if (u < cum) {
            return i;
        }
    }
    return weights.size() - 1;
}

/// 64-bit FNV-1a, used to derive per-(query, doc) streams for the synthetic scorer.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace fairrag
