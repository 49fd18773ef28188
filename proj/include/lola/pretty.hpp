#pragma once

#include <string>

#include "lola/ast.hpp"

namespace lola {

/// Canonical rendering: `&&`, `||`, `==`, `if-then-else`; accesses print as
/// `name[offset,default]` with no interior spaces; bare synchronous accesses
/// print as the plain name. Parentheses only where precedence requires them.
std::string pretty_expr(const Expr& e);

/// One declaration per line, canonical operator spellings.
std::string pretty_spec(const RawSpec& spec);

} // namespace lola
