#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lola/types.hpp"

namespace lola {

/// An input trace: one column per input stream (in declaration order), all
/// columns of equal length N+1. Bool values are stored as 0/1.
struct Trace {
    std::vector<std::string> input_names; // declaration order
    std::vector<TypeTag> input_types;
    std::vector<std::vector<std::int32_t>> columns; // [input][position]
    std::size_t len = 0;                            // N+1 (also kept for zero-input specs)

    std::size_t length() const { return len; }
};

/// Parse a CSV trace against the given spec's input declarations.
///
/// Format: a header row naming every input exactly once (any order), then one
/// row per position. Int32 cells are decimal integers; Bool cells are
/// true/false/1/0. Completely empty text is accepted as the length-0 trace.
/// Errors carry the offending CSV line and 1-based column number.
Trace load_trace_csv(std::string_view text, const TypedSpec& spec);

/// Serialize a trace in the same CSV format (header in declaration order,
/// Bool as true/false, trailing newline).
std::string trace_to_csv(const Trace& trace);

} // namespace lola
