#include <doctest.h>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "lola/parser.hpp"
#include "lola/pretty.hpp"
#include "lola/token.hpp"
#include "lola/trace.hpp"
#include "lola/types.hpp"

using namespace lola;
using testutil::typed;

TEST_SUITE_BEGIN("frontend");

TEST_CASE("tokenizer recognizes the full token inventory") {
    auto toks = tokenize("input x: Int32 // comment\noutput y := x[-1,0] & true");
    std::vector<Tok> kinds;
    for (const auto& t : toks) kinds.push_back(t.kind);
    std::vector<Tok> expect = {
        Tok::KwInput, Tok::Ident,  Tok::Colon,    Tok::Ident,  Tok::KwOutput,
        Tok::Ident,   Tok::Define, Tok::Ident,    Tok::LBracket, Tok::Minus,
        Tok::Int,     Tok::Comma,  Tok::Int,      Tok::RBracket, Tok::AndAnd,
        Tok::KwTrue,  Tok::Eof,
    };
    CHECK(kinds == expect);
    CHECK(toks[1].text == "x");
    CHECK(toks[1].span.line == 1);
    CHECK(toks[4].span.line == 2);
}

TEST_CASE("tokenizer accepts both operator spellings") {
    auto a = tokenize("a & b && c | d || e = f == g");
    int ands = 0, ors = 0, eqs = 0;
    for (const auto& t : a) {
        if (t.kind == Tok::AndAnd) ++ands;
        if (t.kind == Tok::OrOr) ++ors;
        if (t.kind == Tok::EqEq) ++eqs;
    }
    CHECK(ands == 2);
    CHECK(ors == 2);
    CHECK(eqs == 2);
}

TEST_CASE("tokenizer reports lex errors with positions") {
    try {
        tokenize("output x := 1 @ 2");
        FAIL("expected a lex error");
    } catch (const SpecError& e) {
        CHECK(e.kind() == ErrorKind::Lex);
        CHECK(std::string(e.what()).find('@') != std::string::npos);
    }
    try {
        tokenize("trigger x \"unterminated");
        FAIL("expected a lex error");
    } catch (const SpecError& e) {
        CHECK(e.kind() == ErrorKind::Lex);
        CHECK(e.span().line == 1);
    }
}

TEST_CASE("parser handles the altitude example") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    REQUIRE(spec.inputs.size() == 1);
    CHECK(spec.inputs[0].name == "altitude");
    CHECK(spec.inputs[0].type == TypeTag::Int32);
    REQUIRE(spec.outputs.size() == 2);
    CHECK(spec.outputs[0].name == "tooLow");
    CHECK(spec.outputs[0].type == TypeTag::Bool);
    REQUIRE(spec.triggers.size() == 2);
    CHECK(spec.triggers[0].message == "Flying below minimum altitude.");
    CHECK(spec.triggers[1].index == 1);
}

TEST_CASE("parser reports syntax errors with positions") {
    try {
        parse("output x = 1");
        FAIL("expected a parse error");
    } catch (const SpecError& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(e.span().line == 1);
    }
    CHECK_THROWS_AS(parse("input x:"), SpecError);
    CHECK_THROWS_AS(parse("output y := x[1]"), SpecError);       // missing default
    CHECK_THROWS_AS(parse("trigger"), SpecError);
}

TEST_CASE("grouped input declarations and ite sugar") {
    TypedSpec spec = typed("input a, b: Int32, c: Bool\n"
                           "output y := ite(c, a, b)\n"
                           "output z := if c then a else b");
    REQUIRE(spec.inputs.size() == 3);
    CHECK(spec.inputs[0].name == "a");
    CHECK(spec.inputs[2].type == TypeTag::Bool);
    CHECK(expr_equal(*spec.outputs[0].expr, *spec.outputs[1].expr));
}

TEST_CASE("type inference is deterministic and handles chains") {
    TypedSpec spec = typed("input x: Int32\n"
                           "output a := b\n"
                           "output b := c & x > 0\n"
                           "output c := x < 10");
    CHECK(spec.outputs[0].type == TypeTag::Bool);
    CHECK(spec.outputs[1].type == TypeTag::Bool);
    CHECK(spec.outputs[2].type == TypeTag::Bool);

    // Same spec parsed twice yields an identical canonical rendering.
    std::string src = "input x: Int32\noutput a := b\noutput b := x + 1";
    CHECK(pretty_spec(parse(src)) == pretty_spec(parse(src)));
}

TEST_CASE("typecheck rejects ill-typed specifications") {
    auto kind_of = [](const std::string& src) {
        try {
            typed(src);
        } catch (const SpecError& e) {
            return e.kind();
        }
        return ErrorKind::Internal;
    };
    CHECK(kind_of("output y := x") == ErrorKind::Name);
    CHECK(kind_of("input x: Int32\noutput y := x + true") == ErrorKind::Type);
    CHECK(kind_of("input x: Int32\noutput y: Bool := x") == ErrorKind::Type);
    CHECK(kind_of("input b: Bool\noutput y := b[-1,7]") == ErrorKind::DefaultType);
    CHECK(kind_of("input x: Int32\noutput y := ite(x, 1, 2)") == ErrorKind::Type);
    CHECK(kind_of("input x: Int32\noutput y := min(x)") == ErrorKind::Type);
    CHECK(kind_of("input x: Int32\ninput x: Bool\noutput y := 1") == ErrorKind::Name);
}

TEST_CASE("literal and constant zero divisors are compile-time errors") {
    auto kind_of = [](const std::string& src) {
        try {
            typed(src);
        } catch (const SpecError& e) {
            return e.kind();
        }
        return ErrorKind::Internal;
    };
    CHECK(kind_of("input x: Int32\noutput y := x / 0") == ErrorKind::DivisionByZeroLiteral);
    CHECK(kind_of("input x: Int32\noutput y := x % 0") == ErrorKind::DivisionByZeroLiteral);
    CHECK(kind_of("constant zero: Int32 := 0\ninput x: Int32\noutput y := x / zero") ==
          ErrorKind::DivisionByZeroLiteral);
    // A non-zero constant divisor is fine and folds to a literal.
    TypedSpec ok = typed("constant two: Int32 := 2\ninput x: Int32\noutput y := x / two");
    CHECK(ok.outputs[0].expr->args[1]->kind == Expr::Kind::Literal);
    CHECK(ok.outputs[0].expr->args[1]->literal.value == 2);
}

TEST_CASE("constants fold in expression positions") {
    TypedSpec spec = typed("constant limit: Int32 := 600\n"
                           "constant armed: Bool := true\n"
                           "input x: Int32\n"
                           "output y := x[-1,600] > limit\n"
                           "output z := armed & y");
    const Expr& access = *spec.outputs[0].expr->args[0];
    REQUIRE(access.kind == Expr::Kind::StreamAccess);
    REQUIRE(access.dflt.has_value());
    CHECK(access.dflt->value == 600);
    const Expr& folded = *spec.outputs[0].expr->args[1];
    CHECK(folded.kind == Expr::Kind::Literal);
    CHECK(folded.literal.value == 600);
    CHECK(spec.outputs[1].expr->args[0]->kind == Expr::Kind::Literal);

    // Access defaults are literal tokens by the grammar; a constant name
    // there is a parse error, not a resolution error.
    try {
        typed("constant limit: Int32 := 600\ninput x: Int32\noutput y := x[-1,limit]");
        FAIL("expected a parse error");
    } catch (const SpecError& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
}

TEST_CASE("pretty printing is canonical and round-trips") {
    std::string src = lola::read_file(testutil::repo_path("specs/network.lola"));
    RawSpec first = parse(src);
    std::string canon = pretty_spec(first);
    RawSpec second = parse(canon);
    CHECK(pretty_spec(second) == canon);

    // Canonical spellings: && || == and compact accesses.
    TypedSpec spec = typed("input x: Int32\noutput y := x[-1,0] = 3 & x > 0 | false");
    std::string rendered = pretty_expr(*spec.outputs[0].expr);
    CHECK(rendered == "x[-1,0] == 3 && x > 0 || false");
}

TEST_CASE("pretty printing parenthesizes only where required") {
    TypedSpec spec = typed("input x: Int32\n"
                           "output a := (x + 1) * 2\n"
                           "output b := x + 1 * 2\n"
                           "output c := -(x + 1)\n"
                           "output d := x - (x - 1)");
    CHECK(pretty_expr(*spec.outputs[0].expr) == "(x + 1) * 2");
    CHECK(pretty_expr(*spec.outputs[1].expr) == "x + 1 * 2");
    CHECK(pretty_expr(*spec.outputs[2].expr) == "-(x + 1)");
    CHECK(pretty_expr(*spec.outputs[3].expr) == "x - (x - 1)");
}

TEST_CASE("stream table orders inputs before computed streams") {
    TypedSpec spec = testutil::load_spec("specs/network.lola");
    StreamTable table = build_stream_table(spec);
    CHECK(table.num_inputs == 6);
    CHECK(table.size() == 6 + 6 + 3);
    CHECK(table[0].name == "src");
    CHECK(table.is_input(5));
    CHECK(!table.is_input(6));
    CHECK(table[table.index_of.at("trigger_2")].kind == StreamKind::Trigger);
    CHECK(table[table.index_of.at("trigger_0")].message == "Many incoming connections.");
    // Trigger pseudo-streams are Bool-typed.
    CHECK(table[table.index_of.at("trigger_1")].type == TypeTag::Bool);
}

// ---------------------------------------------------------------------------
// Trace CSV loading
// ---------------------------------------------------------------------------

static const char* kTwoInputs = "input x: Int32\ninput b: Bool\noutput y := x";

TEST_CASE("trace loader accepts declaration order and permutations") {
    TypedSpec spec = typed(kTwoInputs);
    Trace t1 = load_trace_csv("x,b\n1,true\n2,false\n", spec);
    REQUIRE(t1.length() == 2);
    CHECK(t1.columns[0] == std::vector<std::int32_t>{1, 2});
    CHECK(t1.columns[1] == std::vector<std::int32_t>{1, 0});

    Trace t2 = load_trace_csv("b,x\ntrue,1\nfalse,2\n", spec);
    CHECK(t2.columns == t1.columns);

    // 1/0 are accepted for Bool.
    Trace t3 = load_trace_csv("x,b\n1,1\n2,0\n", spec);
    CHECK(t3.columns == t1.columns);
}

TEST_CASE("trace loader rejects malformed input") {
    TypedSpec spec = typed(kTwoInputs);
    auto rejects = [&](const std::string& text) {
        try {
            load_trace_csv(text, spec);
            return false;
        } catch (const SpecError& e) {
            return e.kind() == ErrorKind::Trace;
        }
    };
    CHECK(rejects("x\n1\n"));                      // missing column
    CHECK(rejects("x,b,z\n1,true,2\n"));           // unknown column
    CHECK(rejects("x,b\n1\n"));                    // short row
    CHECK(rejects("x,b\n1,true,false\n"));         // long row
    CHECK(rejects("x,b\nfoo,true\n"));             // bad int
    CHECK(rejects("x,b\n1,maybe\n"));              // bad bool
    CHECK(rejects("x,b\n2147483648,true\n"));      // out of Int32 range
    CHECK(rejects("x,x\n1,2\n"));                  // duplicate column
    CHECK(!rejects("x,b\n-2147483648,true\n"));    // INT32_MIN is fine
}

TEST_CASE("trace loader reports the offending CSV position") {
    TypedSpec spec = typed(kTwoInputs);
    try {
        load_trace_csv("x,b\n1,true\nfoo,true\n", spec);
        FAIL("expected a trace error");
    } catch (const SpecError& e) {
        CHECK(e.kind() == ErrorKind::Trace);
        CHECK(e.span().line == 3);
        CHECK(e.span().col == 1);
    }
}

TEST_CASE("blank data line ends the trace") {
    TypedSpec spec = typed(kTwoInputs);
    Trace t = load_trace_csv("x,b\n1,true\n\n2,false\n", spec);
    CHECK(t.length() == 1);
}

TEST_CASE("empty text and zero-input specs") {
    TypedSpec spec = typed(kTwoInputs);
    CHECK(load_trace_csv("", spec).length() == 0);

    TypedSpec closed = typed("output tick := tick[-1,0] + 1");
    Trace t = load_trace_csv("\n\n\n\n", closed);  // header + 3 empty rows
    CHECK(t.length() == 3);
    CHECK_THROWS_AS(load_trace_csv("\n1\n", closed), SpecError);
}

TEST_CASE("trace serialization round-trips") {
    TypedSpec spec = typed(kTwoInputs);
    std::string text = "x,b\n-5,true\n2147483647,false\n0,true\n";
    Trace t = load_trace_csv(text, spec);
    CHECK(trace_to_csv(t) == text);
}

TEST_SUITE_END();
