#include "lola/ast.hpp"

namespace lola {

std::string literal_to_string(const Literal& lit) {
    if (lit.type == TypeTag::Bool) return lit.value ? "true" : "false";
    return std::to_string(lit.value);
}

const char* binary_op_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

const char* builtin_name(Builtin fn) {
    switch (fn) {
        case Builtin::Min: return "min";
        case Builtin::Max: return "max";
        case Builtin::Abs: return "abs";
        case Builtin::Int: return "int";
    }
    return "?";
}

ExprPtr clone_expr(const Expr& e) {
    auto out = std::make_unique<Expr>();
    out->kind = e.kind;
    out->span = e.span;
    out->type = e.type;
    out->literal = e.literal;
    out->name = e.name;
    out->offset = e.offset;
    out->dflt = e.dflt;
    out->unary_op = e.unary_op;
    out->binary_op = e.binary_op;
    out->builtin = e.builtin;
    out->args.reserve(e.args.size());
    for (const auto& a : e.args) out->args.push_back(clone_expr(*a));
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::Literal:
            if (!(a.literal == b.literal)) return false;
            break;
        case Expr::Kind::ConstRef:
            if (a.name != b.name) return false;
            break;
        case Expr::Kind::StreamAccess:
            if (a.name != b.name || a.offset != b.offset || a.dflt != b.dflt) return false;
            break;
        case Expr::Kind::Unary:
            if (a.unary_op != b.unary_op) return false;
            break;
        case Expr::Kind::Binary:
            if (a.binary_op != b.binary_op) return false;
            break;
        case Expr::Kind::Ite:
            break;
        case Expr::Kind::Call:
            if (a.builtin != b.builtin) return false;
            break;
    }
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!expr_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

} // namespace lola
