#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lola/diag.hpp"

namespace lola {

enum class TypeTag { Int32, Bool };

inline std::size_t size_of(TypeTag t) { return t == TypeTag::Int32 ? 4 : 1; }
inline const char* type_name(TypeTag t) { return t == TypeTag::Int32 ? "Int32" : "Bool"; }

/// A compile-time constant; doubles as the runtime value representation.
/// Bool values are stored as 0/1.
struct Literal {
    TypeTag type = TypeTag::Int32;
    std::int32_t value = 0;

    static Literal int32(std::int32_t v) { return {TypeTag::Int32, v}; }
    static Literal boolean(bool v) { return {TypeTag::Bool, v ? 1 : 0}; }

    friend bool operator==(const Literal& a, const Literal& b) {
        return a.type == b.type && a.value == b.value;
    }
};

std::string literal_to_string(const Literal& lit);

enum class UnaryOp { Negate, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class Builtin { Min, Max, Abs, Int };

const char* binary_op_symbol(BinaryOp op);
const char* builtin_name(Builtin fn);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// One expression-tree node. `kind` selects which fields are meaningful:
///   Literal:      literal
///   ConstRef:     name (unresolved constant reference; folded away by typecheck)
///   StreamAccess: name, offset, dflt (dflt absent for a bare synchronous access)
///   Unary:        unary_op, args[0]
///   Binary:       binary_op, args[0], args[1]
///   Ite:          args[0..2] = cond, then, else
///   Call:         builtin, args
struct Expr {
    enum class Kind { Literal, ConstRef, StreamAccess, Unary, Binary, Ite, Call };

    Kind kind = Kind::Literal;
    Span span;
    TypeTag type = TypeTag::Int32;  // filled in by resolve_and_typecheck

    Literal literal;
    std::string name;
    std::int32_t offset = 0;
    std::optional<Literal> dflt;
    UnaryOp unary_op = UnaryOp::Negate;
    BinaryOp binary_op = BinaryOp::Add;
    Builtin builtin = Builtin::Min;
    std::vector<ExprPtr> args;
};

ExprPtr clone_expr(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);  // structural; ignores spans and types

struct InputDecl {
    std::vector<std::string> names;
    TypeTag type = TypeTag::Int32;
    Span span;
};

struct ConstDecl {
    std::string name;
    TypeTag type = TypeTag::Int32;
    Literal value;
    Span span;
};

struct OutputDecl {
    std::string name;
    std::optional<TypeTag> type;  // absent = inferred
    ExprPtr expr;
    Span span;
};

struct TriggerDecl {
    ExprPtr expr;
    std::optional<std::string> message;
    Span span;
};

using Decl = std::variant<InputDecl, ConstDecl, OutputDecl, TriggerDecl>;

struct RawSpec {
    std::vector<Decl> decls;
};

} // namespace lola
