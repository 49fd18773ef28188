#pragma once

#include <cstdint>
#include <limits>

namespace lola {

// Int32 arithmetic semantics shared by the interpreter and (textually) by
// generated monitors: two's-complement wrapping add/sub/mul/neg, truncated
// division, INT32_MIN / -1 == INT32_MIN, INT32_MIN % -1 == 0, wrapping abs.

inline std::int32_t wrap_add(std::int32_t a, std::int32_t b) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) +
                                     static_cast<std::uint32_t>(b));
}

inline std::int32_t wrap_sub(std::int32_t a, std::int32_t b) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) -
                                     static_cast<std::uint32_t>(b));
}

inline std::int32_t wrap_mul(std::int32_t a, std::int32_t b) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) *
                                     static_cast<std::uint32_t>(b));
}

inline std::int32_t wrap_neg(std::int32_t a) {
    return static_cast<std::int32_t>(0u - static_cast<std::uint32_t>(a));
}

inline std::int32_t wrap_abs(std::int32_t a) { return a < 0 ? wrap_neg(a) : a; }

/// Truncated division; caller must rule out b == 0.
inline std::int32_t div_i32(std::int32_t a, std::int32_t b) {
    if (b == -1 && a == std::numeric_limits<std::int32_t>::min()) {
        return std::numeric_limits<std::int32_t>::min();
    }
    return a / b;
}

/// Remainder of truncated division; caller must rule out b == 0.
inline std::int32_t mod_i32(std::int32_t a, std::int32_t b) {
    if (b == -1) return 0; // covers INT32_MIN % -1
    return a % b;
}

} // namespace lola
