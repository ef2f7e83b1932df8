#pragma once

#include <cmath>
#include <cstdint>

namespace matchstat {

// Counter-based 64-bit generator so that ports in other languages reproduce
// the exact streams.  Output i of stream (seed, stream_id) is
//
//     mix(seed ^ mix(stream_id + GOLDEN)  +  (i+1) * GOLDEN)
//
// where GOLDEN = 0x9E3779B97F4A7C15 and mix is the SplitMix64 finalizer
// (Steele, Lea, Flood 2014):
//
//     z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//     z ^= z >> 27; z *= 0x94D049BB133111EB;
//     z ^= z >> 31;
//
// Streams with distinct stream_id are independent for practical purposes and
// may be consumed concurrently; a Rng instance itself is not thread-safe.
class Rng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
        : base_(seed ^ mix(stream_id + kGolden)), counter_(0) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() { return mix(base_ + (++counter_) * kGolden); }

    // Unbiased integer in [0, n) by rejection from the low bits (bitmask
    // method; portable, no 128-bit arithmetic).
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t mask = n - 1;
        mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
        mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
        for (;;) {
            std::uint64_t r = next_u64() & mask;
            if (r < n) return r;
        }
    }

    // Uniform double in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Exponential with given rate via inversion; uses 1-U so the argument of
    // log is in (0,1].
    double next_exponential(double rate) {
        return -std::log(1.0 - next_double()) / rate;
    }

private:
    std::uint64_t base_;
    std::uint64_t counter_;
};

}  // namespace matchstat
