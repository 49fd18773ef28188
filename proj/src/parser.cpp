#include "lola/parser.hpp"

#include <cstdint>

#include "lola/token.hpp"

namespace lola {

namespace {

constexpr std::int64_t kInt32Min = -2147483648LL;
constexpr std::int64_t kInt32Max = 2147483647LL;

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    RawSpec parse_spec() {
        RawSpec spec;
        while (!at(Tok::Eof)) {
            if (at(Tok::KwInput)) {
                parse_input_decls(spec);
            } else if (at(Tok::KwConstant)) {
                spec.decls.push_back(parse_constant_decl());
            } else if (at(Tok::KwOutput)) {
                spec.decls.push_back(parse_output_decl());
            } else if (at(Tok::KwTrigger)) {
                spec.decls.push_back(parse_trigger_decl());
            } else {
                fail("declaration ('input', 'constant', 'output', or 'trigger')");
            }
        }
        return spec;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    bool at(Tok kind) const { return peek().kind == kind; }
    Token advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        throw SpecError(ErrorKind::Parse, t.span,
                        "expected " + expected + ", found " + std::string(token_name(t.kind)));
    }

    Token expect(Tok kind) {
        if (!at(kind)) fail(token_name(kind));
        return advance();
    }

    // input-decl := "input" group ("," group)*   group := ident ("," ident)* ":" type
    // The grouped form accepts both "input a, b: Int32" and "input a: Int32, b: Bool".
    void parse_input_decls(RawSpec& spec) {
        Span at_kw = peek().span;
        expect(Tok::KwInput);
        for (;;) {
            InputDecl decl;
            decl.span = at_kw;
            decl.names.push_back(expect(Tok::Ident).text);
            while (at(Tok::Comma) && peek(1).kind == Tok::Ident) {
                advance();
                decl.names.push_back(expect(Tok::Ident).text);
            }
            expect(Tok::Colon);
            decl.type = parse_type();
            spec.decls.push_back(std::move(decl));
            if (at(Tok::Comma)) {
                advance();
                continue;
            }
            break;
        }
    }

    Decl parse_constant_decl() {
        ConstDecl decl;
        decl.span = peek().span;
        expect(Tok::KwConstant);
        decl.name = expect(Tok::Ident).text;
        expect(Tok::Colon);
        decl.type = parse_type();
        expect(Tok::Define);
        decl.value = parse_literal();
        return decl;
    }

    Decl parse_output_decl() {
        OutputDecl decl;
        decl.span = peek().span;
        expect(Tok::KwOutput);
        decl.name = expect(Tok::Ident).text;
        if (at(Tok::Colon)) {
            advance();
            decl.type = parse_type();
        }
        expect(Tok::Define);
        decl.expr = parse_expr();
        return decl;
    }

    Decl parse_trigger_decl() {
        TriggerDecl decl;
        decl.span = peek().span;
        expect(Tok::KwTrigger);
        decl.expr = parse_expr();
        if (at(Tok::String)) decl.message = advance().text;
        return decl;
    }

    TypeTag parse_type() {
        if (at(Tok::Ident)) {
            Token t = advance();
            if (t.text == "Int32") return TypeTag::Int32;
            if (t.text == "Bool") return TypeTag::Bool;
            throw SpecError(ErrorKind::Parse, t.span,
                            "expected type 'Int32' or 'Bool', found '" + t.text + "'");
        }
        fail("type 'Int32' or 'Bool'");
    }

    std::int32_t checked_int32(std::int64_t v, Span span) {
        if (v < kInt32Min || v > kInt32Max)
            throw SpecError(ErrorKind::Parse, span, "integer literal out of Int32 range");
        return static_cast<std::int32_t>(v);
    }

    Literal parse_literal() {
        if (at(Tok::KwTrue)) { advance(); return Literal::boolean(true); }
        if (at(Tok::KwFalse)) { advance(); return Literal::boolean(false); }
        bool neg = false;
        Span at_sign = peek().span;
        if (at(Tok::Minus)) { neg = true; advance(); }
        if (!at(Tok::Int)) fail("literal");
        Token t = advance();
        std::int64_t v = neg ? -t.int_value : t.int_value;
        return Literal::int32(checked_int32(v, neg ? at_sign : t.span));
    }

    ExprPtr make_expr(Expr::Kind kind, Span span) {
        auto e = std::make_unique<Expr>();
        e->kind = kind;
        e->span = span;
        return e;
    }

    ExprPtr parse_expr() {
        if (at(Tok::KwIf)) return parse_if();
        return parse_or();
    }

    ExprPtr parse_if() {
        Span at_if = peek().span;
        expect(Tok::KwIf);
        auto e = make_expr(Expr::Kind::Ite, at_if);
        e->args.push_back(parse_expr());
        expect(Tok::KwThen);
        e->args.push_back(parse_expr());
        expect(Tok::KwElse);
        e->args.push_back(parse_expr());
        return e;
    }

    ExprPtr parse_binary_level(int level) {
        // levels: 0 = or, 1 = and, 2 = comparisons, 3 = additive, 4 = multiplicative
        if (level == 5) return parse_unary();
        auto lhs = parse_binary_level(level + 1);
        for (;;) {
            BinaryOp op;
            switch (level) {
                case 0:
                    if (!at(Tok::OrOr)) return lhs;
                    op = BinaryOp::Or;
                    break;
                case 1:
                    if (!at(Tok::AndAnd)) return lhs;
                    op = BinaryOp::And;
                    break;
                case 2:
                    if (at(Tok::Lt)) op = BinaryOp::Lt;
                    else if (at(Tok::Le)) op = BinaryOp::Le;
                    else if (at(Tok::Gt)) op = BinaryOp::Gt;
                    else if (at(Tok::Ge)) op = BinaryOp::Ge;
                    else if (at(Tok::EqEq)) op = BinaryOp::Eq;
                    else if (at(Tok::Ne)) op = BinaryOp::Ne;
                    else return lhs;
                    break;
                case 3:
                    if (at(Tok::Plus)) op = BinaryOp::Add;
                    else if (at(Tok::Minus)) op = BinaryOp::Sub;
                    else return lhs;
                    break;
                default:
                    if (at(Tok::Star)) op = BinaryOp::Mul;
                    else if (at(Tok::Slash)) op = BinaryOp::Div;
                    else if (at(Tok::Percent)) op = BinaryOp::Mod;
                    else return lhs;
                    break;
            }
            Span at_op = peek().span;
            advance();
            auto e = make_expr(Expr::Kind::Binary, at_op);
            e->binary_op = op;
            e->args.push_back(std::move(lhs));
            e->args.push_back(parse_binary_level(level + 1));
            lhs = std::move(e);
        }
    }

    ExprPtr parse_or() { return parse_binary_level(0); }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            Span at_op = peek().span;
            advance();
            // Fold -<intlit> into a literal so INT32_MIN is expressible.
            if (at(Tok::Int)) {
                Token t = advance();
                auto e = make_expr(Expr::Kind::Literal, at_op);
                e->literal = Literal::int32(checked_int32(-t.int_value, at_op));
                return e;
            }
            auto e = make_expr(Expr::Kind::Unary, at_op);
            e->unary_op = UnaryOp::Negate;
            e->args.push_back(parse_unary());
            return e;
        }
        if (at(Tok::Bang)) {
            Span at_op = peek().span;
            advance();
            auto e = make_expr(Expr::Kind::Unary, at_op);
            e->unary_op = UnaryOp::Not;
            e->args.push_back(parse_unary());
            return e;
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        Span at_tok = peek().span;
        if (at(Tok::Int)) {
            Token t = advance();
            auto e = make_expr(Expr::Kind::Literal, at_tok);
            e->literal = Literal::int32(checked_int32(t.int_value, t.span));
            return e;
        }
        if (at(Tok::KwTrue) || at(Tok::KwFalse)) {
            bool v = at(Tok::KwTrue);
            advance();
            auto e = make_expr(Expr::Kind::Literal, at_tok);
            e->literal = Literal::boolean(v);
            return e;
        }
        if (at(Tok::LParen)) {
            advance();
            auto e = parse_expr();
            expect(Tok::RParen);
            return e;
        }
        if (at(Tok::KwIf)) return parse_if();
        if (at(Tok::Ident)) {
            Token name = advance();
            if (at(Tok::LParen)) return parse_call(name);
            if (at(Tok::LBracket)) {
                advance();
                auto e = make_expr(Expr::Kind::StreamAccess, at_tok);
                e->name = name.text;
                bool neg = false;
                Span off_span = peek().span;
                if (at(Tok::Minus)) { neg = true; advance(); }
                Token off = expect(Tok::Int);
                e->offset = checked_int32(neg ? -off.int_value : off.int_value,
                                          neg ? off_span : off.span);
                expect(Tok::Comma);
                e->dflt = parse_literal();
                expect(Tok::RBracket);
                return e;
            }
            // Bare name: synchronous stream access (or constant reference —
            // resolved during type checking).
            auto e = make_expr(Expr::Kind::StreamAccess, at_tok);
            e->name = name.text;
            return e;
        }
        fail("expression");
    }

    ExprPtr parse_call(const Token& name) {
        Span at_tok = name.span;
        expect(Tok::LParen);
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
            args.push_back(parse_expr());
            while (at(Tok::Comma)) {
                advance();
                args.push_back(parse_expr());
            }
        }
        expect(Tok::RParen);

        if (name.text == "ite") {
            if (args.size() != 3)
                throw SpecError(ErrorKind::Parse, at_tok,
                                "ite expects 3 arguments, got " + std::to_string(args.size()));
            auto e = make_expr(Expr::Kind::Ite, at_tok);
            e->args = std::move(args);
            return e;
        }
        Builtin fn;
        if (name.text == "min") fn = Builtin::Min;
        else if (name.text == "max") fn = Builtin::Max;
        else if (name.text == "abs") fn = Builtin::Abs;
        else if (name.text == "int") fn = Builtin::Int;
        else
            throw SpecError(ErrorKind::Parse, at_tok,
                            "unknown function '" + name.text + "'");
        auto e = make_expr(Expr::Kind::Call, at_tok);
        e->builtin = fn;
        e->args = std::move(args);
        return e;
    }
};

} // namespace

RawSpec parse(std::string_view source) {
    Parser parser(tokenize(source));
    return parser.parse_spec();
}

} // namespace lola
