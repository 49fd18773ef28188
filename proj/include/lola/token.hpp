#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lola/diag.hpp"

namespace lola {

enum class Tok {
    KwInput,
    KwOutput,
    KwTrigger,
    KwConstant,
    KwIf,
    KwThen,
    KwElse,
    KwTrue,
    KwFalse,
    Ident,
    Int,
    String,
    Define,    // :=
    Colon,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,      // == or = in expression position
    Ne,        // !=
    AndAnd,    // && or &
    OrOr,      // || or |
    Bang,      // !
    Eof,
};

struct Token {
    Tok kind = Tok::Eof;
    Span span;
    std::string text;            // identifier name or decoded string content
    std::int64_t int_value = 0;  // for Tok::Int (unvalidated 64-bit; range-checked later)
};

const char* token_name(Tok kind);

/// Splits source text into tokens. `//` line comments and whitespace are
/// skipped. Throws SpecError{ErrorKind::Lex} on an illegal character,
/// unterminated string, or an integer literal too large for 64 bits.
std::vector<Token> tokenize(std::string_view source);

} // namespace lola
