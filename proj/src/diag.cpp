#include "lola/diag.hpp"

namespace lola {

std::string format_diagnostic(const std::string& file, Span span, const std::string& message) {
    return file + ":" + std::to_string(span.line) + ":" + std::to_string(span.col) +
           ": error: " + message;
}

} // namespace lola
