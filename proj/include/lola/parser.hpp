#pragma once

#include <string_view>

#include "lola/ast.hpp"

namespace lola {

/// Parses specification source text into a RawSpec.
/// Throws SpecError{ErrorKind::Lex} or SpecError{ErrorKind::Parse}.
RawSpec parse(std::string_view source);

} // namespace lola
