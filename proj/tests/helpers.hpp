#pragma once

#include <string>

#include "lola/parser.hpp"
#include "lola/process.hpp"
#include "lola/types.hpp"

namespace testutil {

inline std::string repo_path(const std::string& rel) {
    return std::string(LOLA_REPO_DIR) + "/" + rel;
}

inline lola::TypedSpec typed(const std::string& source) {
    return lola::resolve_and_typecheck(lola::parse(source));
}

inline lola::TypedSpec load_spec(const std::string& rel) {
    return typed(lola::read_file(repo_path(rel)));
}

} // namespace testutil
