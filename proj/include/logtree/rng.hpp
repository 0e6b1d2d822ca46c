#pragma once

#include <cstdint>

namespace logtree {

// Counter-based splittable RNG. Every replication gets its own stream via
// stream_seed = avalanche(master ^ GOLDEN*index); draws are
// avalanche(stream_seed + GOLDEN*counter). The avalanche step is the
// SplitMix64 finalizer, so a stream is exactly a SplitMix64 sequence and
// results do not depend on how replications are scheduled across workers.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t avalanche64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    return avalanche64(master ^ (kGolden * (index + 1)));
}

class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t master, std::uint64_t stream_index)
        : state_(mix_seed(master, stream_index)) {}

    std::uint64_t next_u64() { return avalanche64(state_ += kGolden); }

    /// Uniform in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound >= 1. Lemire multiply-shift with
    /// rejection, exact and platform independent.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_ = 0;
};

}  // namespace logtree
