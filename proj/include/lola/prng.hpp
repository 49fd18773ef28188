#pragma once

#include <cstdint>

namespace lola {

// Pinned PRNG: xorshift64* (Vigna). Trace generation, the difftest harness,
// and the embedded-input mode of generated monitors all use exactly this
// sequence so that a seed fully determines the trace on both sides.
//
//   state ^= state >> 12; state ^= state << 25; state ^= state >> 27;
//   return state * 2685821657736338717
//
// Seed 0 (invalid for xorshift) is remapped to 0x9E3779B97F4A7C15.
struct XorShift64Star {
    std::uint64_t state;

    explicit XorShift64Star(std::uint64_t seed)
        : state(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

    std::uint64_t next() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 2685821657736338717ULL;
    }

    /// Uniform in [lo, hi] (inclusive), lo <= hi.
    std::int32_t next_int32(std::int32_t lo, std::int32_t hi) {
        std::uint64_t span =
            static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
        return static_cast<std::int32_t>(lo + static_cast<std::int64_t>(next() % span));
    }

    bool next_bool() { return (next() & 1) != 0; }
};

/// splitmix64 finalizer; used by the bench checksum.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Order-insensitive per-cell checksum term: node = computed-stream ordinal
/// (declaration order), pos = stream position, bits = value (Bool as 0/1).
/// The full checksum is the 64-bit wrapping sum of the terms of all cells.
inline std::uint64_t checksum_cell(std::uint32_t node, std::int64_t pos, std::uint32_t bits) {
    return mix64(static_cast<std::uint64_t>(node) * 0x9E3779B97F4A7C15ULL ^
                 static_cast<std::uint64_t>(pos) * 0xC2B2AE3D27D4EB4FULL ^
                 static_cast<std::uint64_t>(bits));
}

} // namespace lola
