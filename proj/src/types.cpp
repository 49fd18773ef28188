#include "lola/types.hpp"

#include <optional>
#include <unordered_map>

#include "lola/pretty.hpp"

namespace lola {

const char* stream_kind_name(StreamKind k) {
    switch (k) {
        case StreamKind::Input: return "input";
        case StreamKind::Output: return "output";
        case StreamKind::Trigger: return "trigger";
    }
    return "?";
}

namespace {

[[noreturn]] void type_error(Span span, const std::string& message) {
    throw SpecError(ErrorKind::Type, span, message);
}

class Checker {
public:
    explicit Checker(const RawSpec& raw) : raw_(raw) {}

    TypedSpec run() {
        collect_names();
        infer_output_types();
        build_typed_decls();
        return std::move(spec_);
    }

private:
    const RawSpec& raw_;
    TypedSpec spec_;
    std::unordered_map<std::string, TypeTag> stream_type_;       // inputs + resolved outputs
    std::unordered_map<std::string, const OutputDecl*> output_decl_;
    std::unordered_map<std::string, Literal> constant_value_;

    void declare(const std::string& name, NameKind kind, Span span) {
        auto [_, inserted] = spec_.names.emplace(name, kind);
        if (!inserted)
            throw SpecError(ErrorKind::Name, span, "duplicate declaration of '" + name + "'");
    }

    void collect_names() {
        for (const auto& decl : raw_.decls) {
            if (const auto* in = std::get_if<InputDecl>(&decl)) {
                for (const auto& name : in->names) {
                    declare(name, NameKind::Input, in->span);
                    stream_type_[name] = in->type;
                }
            } else if (const auto* c = std::get_if<ConstDecl>(&decl)) {
                declare(c->name, NameKind::Constant, c->span);
                if (c->value.type != c->type)
                    type_error(c->span, "constant '" + c->name + "' declared " +
                                            type_name(c->type) + " but initialized with a " +
                                            type_name(c->value.type) + " literal");
                constant_value_[c->name] = c->value;
            } else if (const auto* o = std::get_if<OutputDecl>(&decl)) {
                declare(o->name, NameKind::Output, o->span);
                output_decl_[o->name] = o;
                if (o->type) stream_type_[o->name] = *o->type;
            }
        }
    }

    // Best-effort type of an expression given currently known stream types;
    // nullopt when it hinges on a stream whose type is still pending.
    std::optional<TypeTag> sketch_type(const Expr& e) const {
        switch (e.kind) {
            case Expr::Kind::Literal: return e.literal.type;
            case Expr::Kind::ConstRef: return std::nullopt;  // not produced by the parser
            case Expr::Kind::StreamAccess: {
                if (auto it = constant_value_.find(e.name); it != constant_value_.end())
                    return it->second.type;
                if (auto it = stream_type_.find(e.name); it != stream_type_.end())
                    return it->second;
                if (e.dflt) return e.dflt->type;  // default pins the accessed type
                return std::nullopt;
            }
            case Expr::Kind::Unary:
                return e.unary_op == UnaryOp::Negate ? TypeTag::Int32 : TypeTag::Bool;
            case Expr::Kind::Binary:
                switch (e.binary_op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub:
                    case BinaryOp::Mul:
                    case BinaryOp::Div:
                    case BinaryOp::Mod: return TypeTag::Int32;
                    default: return TypeTag::Bool;
                }
            case Expr::Kind::Ite: {
                if (auto t = sketch_type(*e.args[1])) return t;
                return sketch_type(*e.args[2]);
            }
            case Expr::Kind::Call: return TypeTag::Int32;
        }
        return std::nullopt;
    }

    void infer_output_types() {
        std::vector<const OutputDecl*> pending;
        for (const auto& decl : raw_.decls)
            if (const auto* o = std::get_if<OutputDecl>(&decl))
                if (!o->type) pending.push_back(o);
        while (!pending.empty()) {
            std::vector<const OutputDecl*> next;
            for (const OutputDecl* o : pending) {
                if (auto t = sketch_type(*o->expr))
                    stream_type_[o->name] = *t;
                else
                    next.push_back(o);
            }
            if (next.size() == pending.size()) break;  // no progress
            pending = std::move(next);
        }
        // Unconstrained inference cycles (e.g. `output a := b` / `output b :=
        // a`) default to Int32; the full check below still validates every
        // use, and ill-formedness of such specs is reported by the analysis.
        for (const OutputDecl* o : pending) stream_type_.emplace(o->name, TypeTag::Int32);
    }

    TypeTag check(Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Literal:
                e.type = e.literal.type;
                return e.type;
            case Expr::Kind::ConstRef:
                type_error(e.span, "internal: unresolved ConstRef");
            case Expr::Kind::StreamAccess: {
                if (auto it = constant_value_.find(e.name); it != constant_value_.end()) {
                    if (e.dflt)
                        throw SpecError(ErrorKind::Name, e.span,
                                        "cannot access constant '" + e.name + "' with an offset");
                    // Fold the constant reference into a literal node.
                    e.kind = Expr::Kind::Literal;
                    e.literal = it->second;
                    e.name.clear();
                    e.type = e.literal.type;
                    return e.type;
                }
                auto it = stream_type_.find(e.name);
                if (it == stream_type_.end())
                    throw SpecError(ErrorKind::Name, e.span, "unknown name '" + e.name + "'");
                if (e.dflt && e.dflt->type != it->second)
                    throw SpecError(ErrorKind::DefaultType, e.span,
                                    "default literal of type " +
                                        std::string(type_name(e.dflt->type)) +
                                        " for access to " + type_name(it->second) +
                                        " stream '" + e.name + "'");
                e.type = it->second;
                return e.type;
            }
            case Expr::Kind::Unary: {
                TypeTag arg = check(*e.args[0]);
                if (e.unary_op == UnaryOp::Negate) {
                    if (arg != TypeTag::Int32)
                        type_error(e.span, "unary '-' expects Int32, found Bool");
                    e.type = TypeTag::Int32;
                } else {
                    if (arg != TypeTag::Bool)
                        type_error(e.span, "'!' expects Bool, found Int32");
                    e.type = TypeTag::Bool;
                }
                return e.type;
            }
            case Expr::Kind::Binary: {
                TypeTag lhs = check(*e.args[0]);
                TypeTag rhs = check(*e.args[1]);
                const char* sym = binary_op_symbol(e.binary_op);
                switch (e.binary_op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub:
                    case BinaryOp::Mul:
                    case BinaryOp::Div:
                    case BinaryOp::Mod:
                        if (lhs != TypeTag::Int32 || rhs != TypeTag::Int32)
                            type_error(e.span, std::string("'") + sym +
                                                   "' expects Int32 operands");
                        if ((e.binary_op == BinaryOp::Div || e.binary_op == BinaryOp::Mod) &&
                            e.args[1]->kind == Expr::Kind::Literal &&
                            e.args[1]->literal.value == 0)
                            throw SpecError(ErrorKind::DivisionByZeroLiteral, e.span,
                                            std::string("division by zero literal in '") +
                                                sym + "'");
                        e.type = TypeTag::Int32;
                        break;
                    case BinaryOp::Lt:
                    case BinaryOp::Le:
                    case BinaryOp::Gt:
                    case BinaryOp::Ge:
                    case BinaryOp::Eq:
                    case BinaryOp::Ne:
                        if (lhs != TypeTag::Int32 || rhs != TypeTag::Int32)
                            type_error(e.span, std::string("'") + sym +
                                                   "' expects Int32 operands");
                        e.type = TypeTag::Bool;
                        break;
                    case BinaryOp::And:
                    case BinaryOp::Or:
                        if (lhs != TypeTag::Bool || rhs != TypeTag::Bool)
                            type_error(e.span, std::string("'") + sym +
                                                   "' expects Bool operands");
                        e.type = TypeTag::Bool;
                        break;
                }
                return e.type;
            }
            case Expr::Kind::Ite: {
                if (check(*e.args[0]) != TypeTag::Bool)
                    type_error(e.args[0]->span, "condition must be Bool");
                TypeTag t = check(*e.args[1]);
                TypeTag f = check(*e.args[2]);
                if (t != f)
                    type_error(e.span, std::string("branches of conditional differ: ") +
                                           type_name(t) + " vs " + type_name(f));
                e.type = t;
                return e.type;
            }
            case Expr::Kind::Call: {
                std::size_t arity = (e.builtin == Builtin::Min || e.builtin == Builtin::Max) ? 2 : 1;
                if (e.args.size() != arity)
                    type_error(e.span, std::string(builtin_name(e.builtin)) + " expects " +
                                           std::to_string(arity) + " argument" +
                                           (arity == 1 ? "" : "s") + ", got " +
                                           std::to_string(e.args.size()));
                TypeTag want = e.builtin == Builtin::Int ? TypeTag::Bool : TypeTag::Int32;
                for (auto& a : e.args) {
                    if (check(*a) != want)
                        type_error(a->span, std::string(builtin_name(e.builtin)) + " expects " +
                                                type_name(want) + " arguments");
                }
                e.type = TypeTag::Int32;
                return e.type;
            }
        }
        type_error(e.span, "internal: unhandled expression kind");
    }

    void build_typed_decls() {
        int decl_pos = 0;
        for (const auto& decl : raw_.decls) {
            if (const auto* in = std::get_if<InputDecl>(&decl)) {
                for (const auto& name : in->names)
                    spec_.inputs.push_back(InputStream{name, in->type, in->span});
            } else if (const auto* c = std::get_if<ConstDecl>(&decl)) {
                spec_.constants.push_back(Constant{c->name, c->type, c->value, c->span});
            } else if (const auto* o = std::get_if<OutputDecl>(&decl)) {
                OutputStream out;
                out.name = o->name;
                out.expr = clone_expr(*o->expr);
                out.decl_pos = decl_pos++;
                out.span = o->span;
                TypeTag inferred = check(*out.expr);
                if (o->type && *o->type != inferred)
                    type_error(o->span, "output '" + o->name + "' declared " +
                                            type_name(*o->type) + " but expression has type " +
                                            type_name(inferred));
                // For unannotated outputs the sketch may have defaulted the
                // type; trust the full check.
                if (inferred != stream_type_.at(o->name) && !o->type)
                    type_error(o->span, "output '" + o->name + "' used as " +
                                            type_name(stream_type_.at(o->name)) +
                                            " but expression has type " + type_name(inferred));
                out.type = inferred;
                spec_.outputs.push_back(std::move(out));
            } else if (const auto* t = std::get_if<TriggerDecl>(&decl)) {
                TriggerStream trig;
                trig.index = static_cast<int>(spec_.triggers.size());
                trig.expr = clone_expr(*t->expr);
                trig.decl_pos = decl_pos++;
                trig.span = t->span;
                if (check(*trig.expr) != TypeTag::Bool)
                    type_error(t->span, "trigger condition must be Bool, found Int32");
                trig.message = t->message ? *t->message : pretty_expr(*trig.expr);
                spec_.triggers.push_back(std::move(trig));
            }
        }
        // Trigger pseudo-streams are named trigger_<i>; forbid collisions so
        // every analysis/report name is unambiguous.
        for (const auto& trig : spec_.triggers) {
            std::string pseudo = "trigger_" + std::to_string(trig.index);
            if (spec_.names.count(pseudo))
                throw SpecError(ErrorKind::Name, trig.span,
                                "stream name '" + pseudo +
                                    "' collides with a trigger pseudo-stream");
        }
    }
};

} // namespace

TypedSpec resolve_and_typecheck(const RawSpec& raw) {
    Checker checker(raw);
    return checker.run();
}

StreamTable build_stream_table(const TypedSpec& spec) {
    StreamTable table;
    for (const auto& in : spec.inputs) {
        table.index_of[in.name] = static_cast<int>(table.streams.size());
        table.streams.push_back(
            StreamInfo{in.name, StreamKind::Input, in.type, nullptr, -1, {}, in.span});
    }
    table.num_inputs = table.streams.size();

    std::vector<StreamInfo> computed(spec.outputs.size() + spec.triggers.size());
    for (const auto& out : spec.outputs) {
        computed[static_cast<std::size_t>(out.decl_pos)] =
            StreamInfo{out.name, StreamKind::Output, out.type, out.expr.get(), -1, {}, out.span};
    }
    for (const auto& trig : spec.triggers) {
        computed[static_cast<std::size_t>(trig.decl_pos)] =
            StreamInfo{"trigger_" + std::to_string(trig.index), StreamKind::Trigger,
                       TypeTag::Bool, trig.expr.get(), trig.index, trig.message, trig.span};
    }
    for (auto& info : computed) {
        table.index_of[info.name] = static_cast<int>(table.streams.size());
        table.streams.push_back(std::move(info));
    }
    return table;
}

} // namespace lola
