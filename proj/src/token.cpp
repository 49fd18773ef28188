#include "lola/token.hpp"

#include <cctype>
#include <unordered_map>

namespace lola {

const char* token_name(Tok kind) {
    switch (kind) {
        case Tok::KwInput: return "'input'";
        case Tok::KwOutput: return "'output'";
        case Tok::KwTrigger: return "'trigger'";
        case Tok::KwConstant: return "'constant'";
        case Tok::KwIf: return "'if'";
        case Tok::KwThen: return "'then'";
        case Tok::KwElse: return "'else'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer literal";
        case Tok::String: return "string literal";
        case Tok::Define: return "':='";
        case Tok::Colon: return "':'";
        case Tok::Comma: return "','";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::EqEq: return "'=='";
        case Tok::Ne: return "'!='";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
        case Tok::Bang: return "'!'";
        case Tok::Eof: return "end of input";
    }
    return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keyword_table() {
    static const std::unordered_map<std::string_view, Tok> table = {
        {"input", Tok::KwInput},     {"output", Tok::KwOutput},
        {"trigger", Tok::KwTrigger}, {"constant", Tok::KwConstant},
        {"if", Tok::KwIf},           {"then", Tok::KwThen},
        {"else", Tok::KwElse},       {"true", Tok::KwTrue},
        {"false", Tok::KwFalse},
    };
    return table;
}

struct Cursor {
    std::string_view src;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    bool done() const { return pos >= src.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }
    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    Span span() const { return {line, col}; }
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

std::vector<Token> tokenize(std::string_view source) {
    std::vector<Token> out;
    Cursor cur{source};

    auto push = [&](Tok kind, Span span, std::string text = {}, std::int64_t value = 0) {
        out.push_back(Token{kind, span, std::move(text), value});
    };

    while (!cur.done()) {
        char c = cur.peek();
        Span at = cur.span();

        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            cur.advance();
            continue;
        }
        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            continue;
        }
        if (is_ident_start(c)) {
            std::string word;
            while (!cur.done() && is_ident_char(cur.peek())) word.push_back(cur.advance());
            auto it = keyword_table().find(word);
            if (it != keyword_table().end()) {
                push(it->second, at);
            } else {
                push(Tok::Ident, at, std::move(word));
            }
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek())))
                digits.push_back(cur.advance());
            std::int64_t value = 0;
            for (char d : digits) {
                if (value > (INT64_MAX - (d - '0')) / 10)
                    throw SpecError(ErrorKind::Lex, at, "integer literal too large");
                value = value * 10 + (d - '0');
            }
            push(Tok::Int, at, digits, value);
            continue;
        }
        if (c == '"') {
            cur.advance();
            std::string content;
            for (;;) {
                if (cur.done() || cur.peek() == '\n')
                    throw SpecError(ErrorKind::Lex, at, "unterminated string literal");
                char d = cur.advance();
                if (d == '"') break;
                if (d == '\\') {
                    if (cur.done())
                        throw SpecError(ErrorKind::Lex, at, "unterminated string literal");
                    char e = cur.advance();
                    if (e == '"' || e == '\\') {
                        content.push_back(e);
                    } else {
                        throw SpecError(ErrorKind::Lex, cur.span(),
                                        std::string("unsupported escape '\\") + e + "' in string");
                    }
                } else {
                    content.push_back(d);
                }
            }
            push(Tok::String, at, std::move(content));
            continue;
        }

        auto two = [&](char second) { return cur.peek(1) == second; };
        switch (c) {
            case ':':
                cur.advance();
                if (cur.peek() == '=') {
                    cur.advance();
                    push(Tok::Define, at);
                } else {
                    push(Tok::Colon, at);
                }
                continue;
            case ',': cur.advance(); push(Tok::Comma, at); continue;
            case '(': cur.advance(); push(Tok::LParen, at); continue;
            case ')': cur.advance(); push(Tok::RParen, at); continue;
            case '[': cur.advance(); push(Tok::LBracket, at); continue;
            case ']': cur.advance(); push(Tok::RBracket, at); continue;
            case '+': cur.advance(); push(Tok::Plus, at); continue;
            case '-': cur.advance(); push(Tok::Minus, at); continue;
            case '*': cur.advance(); push(Tok::Star, at); continue;
            case '/': cur.advance(); push(Tok::Slash, at); continue;
            case '%': cur.advance(); push(Tok::Percent, at); continue;
            case '<':
                cur.advance();
                if (cur.peek() == '=') { cur.advance(); push(Tok::Le, at); }
                else { push(Tok::Lt, at); }
                continue;
            case '>':
                cur.advance();
                if (cur.peek() == '=') { cur.advance(); push(Tok::Ge, at); }
                else { push(Tok::Gt, at); }
                continue;
            case '=':
                cur.advance();
                if (cur.peek() == '=') cur.advance();
                push(Tok::EqEq, at);
                continue;
            case '!':
                if (two('=')) { cur.advance(); cur.advance(); push(Tok::Ne, at); }
                else { cur.advance(); push(Tok::Bang, at); }
                continue;
            case '&':
                cur.advance();
                if (cur.peek() == '&') cur.advance();
                push(Tok::AndAnd, at);
                continue;
            case '|':
                cur.advance();
                if (cur.peek() == '|') cur.advance();
                push(Tok::OrOr, at);
                continue;
            default:
                throw SpecError(ErrorKind::Lex, at,
                                std::string("illegal character '") + c + "'");
        }
    }

    out.push_back(Token{Tok::Eof, cur.span(), {}, 0});
    return out;
}

} // namespace lola
