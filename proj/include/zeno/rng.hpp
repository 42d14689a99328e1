#pragma once

#include <cstdint>
#include <random>

namespace zeno {

// SplitMix64 finalizer. Bijective on 64-bit words; used only to derive seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for the index-th substream of a master seed. Batch work derives one
// substream per unit of work so results do not depend on scheduling order.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master ^ mix64(index));
}

// Thin wrapper around std::mt19937_64.
//
// The engine's algorithm is pinned by the language standard, and the uniform
// mapping below is fixed arithmetic on the raw output, so every draw is
// bit-identical across platforms and build modes. std::uniform_real_distribution
// is deliberately avoided: its output is implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_raw() { return engine_(); }

    // Uniform on [0, 1): top 53 bits of the raw draw.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Consumes exactly one uniform regardless of p.
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace zeno
