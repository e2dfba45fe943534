#pragma once

#include <cstdint>
#include <numbers>
#include <random>

namespace nfmimo
{
    // 64-bit Mersenne twister with a portable uniform mapping, so that sequences are
    // identical across standard library implementations.
    class rng
    {
    public:
        explicit rng(std::uint64_t seed) : engine_(seed) {}

        // Uniform on [0, 1) with 53 random bits.
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        // Uniform on [lo, hi).
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // Uniform phase on [-pi, pi).
        double phase() { return uniform(-std::numbers::pi, std::numbers::pi); }

        std::uint64_t next_u64() { return engine_(); }

    private:
        std::mt19937_64 engine_;
    };

    // SplitMix64 finalizer.
    constexpr std::uint64_t mix64(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Seed of the private stream owned by Monte Carlo realization `index`.
    constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index)
    {
        return mix64(master ^ mix64(index + 0x632be59bd9b4e019ULL));
    }
}
