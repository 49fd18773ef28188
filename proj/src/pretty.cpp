#include "lola/pretty.hpp"

#include <sstream>

namespace lola {

namespace {

// Precedence levels matching the parser: or=0, and=1, comparison=2,
// additive=3, multiplicative=4, unary=5, atom=6. If-then-else is only legal
// where a full expression is (level 0 contexts); anywhere tighter it needs
// parentheses.
int binary_level(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return 0;
        case BinaryOp::And: return 1;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 2;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 3;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return 4;
    }
    return 6;
}

void render(const Expr& e, int min_level, std::string& out) {
    switch (e.kind) {
        case Expr::Kind::Literal:
            out += literal_to_string(e.literal);
            return;
        case Expr::Kind::ConstRef:
            out += e.name;
            return;
        case Expr::Kind::StreamAccess:
            out += e.name;
            if (e.dflt) {
                out += "[";
                out += std::to_string(e.offset);
                out += ",";
                out += literal_to_string(*e.dflt);
                out += "]";
            }
            return;
        case Expr::Kind::Unary: {
            bool paren = min_level > 5;
            if (paren) out += "(";
            out += e.unary_op == UnaryOp::Negate ? "-" : "!";
            const Expr& arg = *e.args[0];
            if (e.unary_op == UnaryOp::Negate && arg.kind == Expr::Kind::Literal &&
                arg.literal.type == TypeTag::Int32) {
                // "-5" would re-parse as a single literal; keep the node.
                out += "(";
                render(arg, 0, out);
                out += ")";
            } else {
                render(arg, 5, out);
            }
            if (paren) out += ")";
            return;
        }
        case Expr::Kind::Binary: {
            int level = binary_level(e.binary_op);
            bool paren = min_level > level;
            if (paren) out += "(";
            render(*e.args[0], level, out);
            out += " ";
            out += binary_op_symbol(e.binary_op);
            out += " ";
            render(*e.args[1], level + 1, out);
            if (paren) out += ")";
            return;
        }
        case Expr::Kind::Ite: {
            bool paren = min_level > 0;
            if (paren) out += "(";
            out += "if ";
            render(*e.args[0], 0, out);
            out += " then ";
            render(*e.args[1], 0, out);
            out += " else ";
            render(*e.args[2], 0, out);
            if (paren) out += ")";
            return;
        }
        case Expr::Kind::Call: {
            out += builtin_name(e.builtin);
            out += "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                render(*e.args[i], 0, out);
            }
            out += ")";
            return;
        }
    }
}

std::string escape_string(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string pretty_expr(const Expr& e) {
    std::string out;
    render(e, 0, out);
    return out;
}

std::string pretty_spec(const RawSpec& spec) {
    std::ostringstream out;
    for (const auto& decl : spec.decls) {
        if (const auto* in = std::get_if<InputDecl>(&decl)) {
            out << "input ";
            for (std::size_t i = 0; i < in->names.size(); ++i) {
                if (i) out << ", ";
                out << in->names[i];
            }
            out << ": " << type_name(in->type) << "\n";
        } else if (const auto* c = std::get_if<ConstDecl>(&decl)) {
            out << "constant " << c->name << ": " << type_name(c->type) << " := "
                << literal_to_string(c->value) << "\n";
        } else if (const auto* o = std::get_if<OutputDecl>(&decl)) {
            out << "output " << o->name;
            if (o->type) out << ": " << type_name(*o->type);
            out << " := " << pretty_expr(*o->expr) << "\n";
        } else if (const auto* t = std::get_if<TriggerDecl>(&decl)) {
            out << "trigger " << pretty_expr(*t->expr);
            if (t->message) out << " \"" << escape_string(*t->message) << "\"";
            out << "\n";
        }
    }
    return out.str();
}

} // namespace lola
