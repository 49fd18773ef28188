#pragma once

#include <stdexcept>
#include <string>

namespace lola {

/// 1-based source position; {0,0} means "no position".
struct Span {
    int line = 0;
    int col = 0;
};

enum class ErrorKind {
    Lex,
    Parse,
    Name,
    Type,
    DefaultType,
    DivisionByZeroLiteral,
    WellFormedness,
    Trace,     // malformed trace CSV
    Internal,  // "must be unreachable" conditions
};

/// Any error that makes a specification (or trace) unusable.
/// The CLI maps these to exit code 1 (ErrorKind::Internal maps to 3).
class SpecError : public std::runtime_error {
public:
    SpecError(ErrorKind kind, Span span, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind), span_(span) {}

    ErrorKind kind() const { return kind_; }
    Span span() const { return span_; }

private:
    ErrorKind kind_;
    Span span_;
};

/// Renders "<file>:<line>:<col>: error: <message>".
std::string format_diagnostic(const std::string& file, Span span, const std::string& message);

} // namespace lola
