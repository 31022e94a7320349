#pragma once
// Deterministic, platform-independent randomness. Every simulation actor
// owns an independent stream derived from the master seed by a fixed
// splitting rule, so adding or removing a node never perturbs the draws of
// the others. Distribution sampling is hand-rolled (bounded rejection,
// inverse-transform exponential) because the standard library's
// distributions are not bit-reproducible across implementations.

#include <cmath>
#include <cstdint>

namespace coex {

// splitmix64: the standard 64-bit finalizing mixer, used to expand the
// master seed into per-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// xoshiro-style 64-bit PRNG seeded via splitmix64; small, fast, and fully
// specified here so streams are identical on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s = splitmix64(s);
            w = s;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform integer in [0, bound) by rejection (no modulo bias).
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = ~0ull - ~0ull % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return (next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Exponential with the given rate (inverse transform; log1p keeps
    // precision for small draws).
    double next_exponential(double rate) {
        return -std::log1p(-next_unit()) / rate;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

// Stream-splitting rule: stream k of master seed s is seeded with
// splitmix64(s ^ golden * (k + 1)). Streams are indexed by (node kind,
// node index, purpose) packed into 64 bits.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return Rng(splitmix64(master_seed ^
                          (0x9E3779B97F4A7C15ull * (stream_id + 1))));
}

inline std::uint64_t stream_id(std::uint32_t kind, std::uint32_t index,
                               std::uint32_t purpose) {
    return (static_cast<std::uint64_t>(kind) << 48) |
           (static_cast<std::uint64_t>(purpose) << 32) | index;
}

}  // namespace coex
