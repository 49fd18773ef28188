#include "lola/interpreter.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "lola/arith.hpp"
#include "lola/diag.hpp"
#include "lola/prng.hpp"

namespace lola {
namespace {

constexpr std::uint8_t kUnknown = 0;
constexpr std::uint8_t kKnown = 1;
constexpr std::uint8_t kFaulted = 2;

/// A read-only view over partially known stream values.
struct CellView {
    const TypedSpec* spec;
    const Trace* trace;
    const std::vector<std::vector<std::int32_t>>* values; // computed nodes
    const std::vector<std::vector<std::uint8_t>>* states;
    const std::unordered_map<std::string, std::size_t>* input_slot;
    const std::unordered_map<std::string, std::size_t>* computed_slot;
    std::int64_t last; // N = length - 1
};

struct InternalResult {
    EvalState state = EvalState::Pending;
    std::int32_t value = 0;
    // When Pending: the computed cell the evaluation is blocked on.
    std::size_t blocked_node = 0;
    std::int64_t blocked_pos = 0;
};

InternalResult value_of(std::int32_t v) {
    return InternalResult{EvalState::Value, v, 0, 0};
}

InternalResult eval_internal(const Expr& e, std::int64_t k, const CellView& ctx) {
    switch (e.kind) {
    case Expr::Kind::Literal:
        return value_of(e.literal.value);
    case Expr::Kind::ConstRef:
        // The type checker folds constant references into literals.
        throw SpecError(ErrorKind::Internal, e.span, "unresolved constant reference in evaluation");
    case Expr::Kind::StreamAccess: {
        std::int64_t p = k + e.offset;
        if (p < 0 || p > ctx.last) {
            if (!e.dflt.has_value()) {
                throw SpecError(ErrorKind::Internal, e.span,
                                "offset-0 access evaluated out of range");
            }
            return value_of(e.dflt->value);
        }
        auto in = ctx.input_slot->find(e.name);
        if (in != ctx.input_slot->end()) {
            return value_of(ctx.trace->columns[in->second][static_cast<std::size_t>(p)]);
        }
        std::size_t c = ctx.computed_slot->at(e.name);
        std::uint8_t st = (*ctx.states)[c][static_cast<std::size_t>(p)];
        if (st == kKnown) {
            return value_of((*ctx.values)[c][static_cast<std::size_t>(p)]);
        }
        // Unknown or faulted: not available (a faulted dependency never
        // becomes available, so the dependent cell stays pending forever).
        return InternalResult{EvalState::Pending, 0, c, p};
    }
    case Expr::Kind::Unary: {
        InternalResult a = eval_internal(*e.args[0], k, ctx);
        if (a.state != EvalState::Value) return a;
        if (e.unary_op == UnaryOp::Negate) return value_of(wrap_neg(a.value));
        return value_of(a.value ? 0 : 1);
    }
    case Expr::Kind::Binary: {
        InternalResult a = eval_internal(*e.args[0], k, ctx);
        if (a.state != EvalState::Value) return a;
        InternalResult b = eval_internal(*e.args[1], k, ctx);
        if (b.state != EvalState::Value) return b;
        switch (e.binary_op) {
        case BinaryOp::Add: return value_of(wrap_add(a.value, b.value));
        case BinaryOp::Sub: return value_of(wrap_sub(a.value, b.value));
        case BinaryOp::Mul: return value_of(wrap_mul(a.value, b.value));
        case BinaryOp::Div:
            if (b.value == 0) return InternalResult{EvalState::Fault, 0, 0, 0};
            return value_of(div_i32(a.value, b.value));
        case BinaryOp::Mod:
            if (b.value == 0) return InternalResult{EvalState::Fault, 0, 0, 0};
            return value_of(mod_i32(a.value, b.value));
        case BinaryOp::Lt: return value_of(a.value < b.value ? 1 : 0);
        case BinaryOp::Le: return value_of(a.value <= b.value ? 1 : 0);
        case BinaryOp::Gt: return value_of(a.value > b.value ? 1 : 0);
        case BinaryOp::Ge: return value_of(a.value >= b.value ? 1 : 0);
        case BinaryOp::Eq: return value_of(a.value == b.value ? 1 : 0);
        case BinaryOp::Ne: return value_of(a.value != b.value ? 1 : 0);
        // and/or are fully strict: both operands are always evaluated.
        case BinaryOp::And: return value_of((a.value && b.value) ? 1 : 0);
        case BinaryOp::Or: return value_of((a.value || b.value) ? 1 : 0);
        }
        throw SpecError(ErrorKind::Internal, e.span, "unhandled binary operator");
    }
    case Expr::Kind::Ite: {
        InternalResult c = eval_internal(*e.args[0], k, ctx);
        if (c.state != EvalState::Value) return c;
        // Only the taken branch is evaluated; faults in the other cannot occur.
        return eval_internal(c.value ? *e.args[1] : *e.args[2], k, ctx);
    }
    case Expr::Kind::Call: {
        InternalResult a = eval_internal(*e.args[0], k, ctx);
        if (a.state != EvalState::Value) return a;
        if (e.builtin == Builtin::Abs) return value_of(wrap_abs(a.value));
        if (e.builtin == Builtin::Int) return value_of(a.value ? 1 : 0);
        InternalResult b = eval_internal(*e.args[1], k, ctx);
        if (b.state != EvalState::Value) return b;
        if (e.builtin == Builtin::Min) return value_of(std::min(a.value, b.value));
        return value_of(std::max(a.value, b.value));
    }
    }
    throw SpecError(ErrorKind::Internal, e.span, "unhandled expression kind");
}

struct SlotMaps {
    std::unordered_map<std::string, std::size_t> input_slot;
    std::unordered_map<std::string, std::size_t> computed_slot;
    std::vector<const Expr*> exprs; // per computed node, decl order
};

SlotMaps build_slots(const TypedSpec& spec) {
    SlotMaps m;
    for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
        m.input_slot.emplace(spec.inputs[i].name, i);
    }
    std::size_t computed = spec.outputs.size() + spec.triggers.size();
    m.exprs.assign(computed, nullptr);
    for (const auto& o : spec.outputs) {
        m.computed_slot.emplace(o.name, static_cast<std::size_t>(o.decl_pos));
        m.exprs[static_cast<std::size_t>(o.decl_pos)] = o.expr.get();
    }
    for (const auto& t : spec.triggers) {
        m.computed_slot.emplace("trigger_" + std::to_string(t.index),
                                static_cast<std::size_t>(t.decl_pos));
        m.exprs[static_cast<std::size_t>(t.decl_pos)] = t.expr.get();
    }
    return m;
}

EvaluationModel run_fixpoint(const TypedSpec& spec, const Trace& trace,
                             const std::uint64_t* order_seed) {
    AnalysisReport report = analyze(spec);
    const StreamTable& table = report.graph.streams;
    SlotMaps slots = build_slots(spec);

    std::size_t computed = slots.exprs.size();
    std::size_t n1 = trace.length();

    EvaluationModel model;
    model.length = n1;
    model.values.assign(computed, std::vector<std::int32_t>(n1, 0));
    model.defined.assign(computed, std::vector<std::uint8_t>(n1, 0));
    std::vector<std::vector<std::uint8_t>> state(computed,
                                                 std::vector<std::uint8_t>(n1, kUnknown));

    for (std::size_t c = 0; c < computed; ++c) {
        std::size_t id = table.num_inputs + c;
        const StreamInfo& info = table.streams[id];
        model.node_names.push_back(info.name);
        model.node_types.push_back(info.type);
        model.trigger_indices.push_back(info.kind == StreamKind::Trigger ? info.trigger_index : -1);
        model.trigger_messages.push_back(info.kind == StreamKind::Trigger ? info.message : "");
        model.node_shifts.push_back(report.shift[id]);
        model.node_layers.push_back(report.layer[id]);
    }

    CellView view{&spec,
                  &trace,
                  &model.values,
                  &state,
                  &slots.input_slot,
                  &slots.computed_slot,
                  static_cast<std::int64_t>(n1) - 1};

    // Attempt order: position-major by default, shuffled when seeded. The
    // fixpoint result does not depend on this order.
    std::vector<std::size_t> order(computed * n1);
    std::iota(order.begin(), order.end(), 0);
    if (order_seed) {
        XorShift64Star rng(*order_seed);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.next() % i);
            std::swap(order[i - 1], order[j]);
        }
    }

    struct FaultCell {
        std::size_t node;
        std::int64_t pos;
    };
    std::vector<FaultCell> faults;

    bool changed = computed > 0 && n1 > 0;
    while (changed) {
        changed = false;
        for (std::size_t idx : order) {
            std::size_t k = idx / computed;
            std::size_t c = idx % computed;
            if (state[c][k] != kUnknown) continue;
            InternalResult r =
                eval_internal(*slots.exprs[c], static_cast<std::int64_t>(k), view);
            if (r.state == EvalState::Value) {
                model.values[c][k] = r.value;
                state[c][k] = kKnown;
                changed = true;
            } else if (r.state == EvalState::Fault) {
                state[c][k] = kFaulted;
                faults.push_back({c, static_cast<std::int64_t>(k)});
                changed = true;
            }
        }
    }

    for (std::size_t c = 0; c < computed; ++c) {
        for (std::size_t k = 0; k < n1; ++k) {
            model.defined[c][k] = state[c][k] == kKnown ? 1 : 0;
        }
    }

    if (faults.empty()) {
        for (std::size_t c = 0; c < computed; ++c) {
            for (std::size_t k = 0; k < n1; ++k) {
                if (state[c][k] != kKnown) {
                    throw SpecError(ErrorKind::Internal, Span{0, 0},
                                    "evaluation stuck without a fault on a well-formed spec");
                }
            }
        }
        model.dump_rows = static_cast<std::int64_t>(n1);
    } else {
        // The monitor hits the schedule-minimal fault: ascending rounds,
        // layers within a round, declaration order within a layer.
        const FaultCell* best = nullptr;
        auto key = [&](const FaultCell& f) {
            return std::make_tuple(f.pos + model.node_shifts[f.node],
                                   model.node_layers[f.node], f.node);
        };
        for (const FaultCell& f : faults) {
            if (!best || key(f) < key(*best)) best = &f;
        }
        Fault fault;
        fault.stream = model.node_names[best->node];
        fault.position = best->pos;
        fault.round = best->pos + model.node_shifts[best->node];
        fault.layer = model.node_layers[best->node];
        model.fault = fault;
        model.dump_rows = std::max<std::int64_t>(0, fault.round - report.postlen);
    }

    // All defined trigger firings, canonical (position, index) order.
    for (std::size_t c = 0; c < computed; ++c) {
        if (model.trigger_indices[c] < 0) continue;
        for (std::size_t k = 0; k < n1; ++k) {
            if (model.defined[c][k] && model.values[c][k] != 0) {
                model.firings.push_back(Firing{static_cast<std::int64_t>(k),
                                               model.trigger_indices[c],
                                               model.trigger_messages[c]});
            }
        }
    }
    std::sort(model.firings.begin(), model.firings.end(),
              [](const Firing& a, const Firing& b) {
                  return std::tie(a.position, a.trigger_index) <
                         std::tie(b.position, b.trigger_index);
              });
    return model;
}

} // namespace

PartialModel::PartialModel(const TypedSpec& spec, std::size_t length)
    : spec_(&spec), length_(length) {
    std::size_t computed = spec.outputs.size() + spec.triggers.size();
    values_.assign(computed, std::vector<std::int32_t>(length, 0));
    known_.assign(computed, std::vector<std::uint8_t>(length, kUnknown));
}

void PartialModel::set(const std::string& stream, std::size_t position, std::int32_t value) {
    SlotMaps slots = build_slots(*spec_);
    auto it = slots.computed_slot.find(stream);
    if (it == slots.computed_slot.end() || position >= length_) {
        throw SpecError(ErrorKind::Internal, Span{0, 0},
                        "PartialModel::set: unknown stream or out-of-range position");
    }
    values_[it->second][position] = value;
    known_[it->second][position] = kKnown;
}

EvalResult eval_expr(const Expr& expr, std::int64_t k, const PartialModel& model,
                     const Trace& trace) {
    SlotMaps slots = build_slots(model.spec());
    CellView view{&model.spec(),
                  &trace,
                  &model.values(),
                  &model.known(),
                  &slots.input_slot,
                  &slots.computed_slot,
                  static_cast<std::int64_t>(model.length()) - 1};
    InternalResult r = eval_internal(expr, k, view);
    return EvalResult{r.state, r.value};
}

EvaluationModel evaluate(const TypedSpec& spec, const Trace& trace) {
    return run_fixpoint(spec, trace, nullptr);
}

EvaluationModel evaluate_with_order(const TypedSpec& spec, const Trace& trace,
                                    std::uint64_t order_seed) {
    return run_fixpoint(spec, trace, &order_seed);
}

std::vector<Firing> reported_firings(const EvaluationModel& model) {
    std::vector<Firing> out;
    for (std::size_t c = 0; c < model.node_names.size(); ++c) {
        if (model.trigger_indices[c] < 0) continue;
        for (std::size_t k = 0; k < model.length; ++k) {
            if (!model.defined[c][k] || model.values[c][k] == 0) continue;
            if (model.fault) {
                auto cell_key = std::make_pair(
                    static_cast<std::int64_t>(k) + model.node_shifts[c], model.node_layers[c]);
                auto fault_key = std::make_pair(model.fault->round, model.fault->layer);
                if (!(cell_key < fault_key)) continue;
            }
            out.push_back(Firing{static_cast<std::int64_t>(k), model.trigger_indices[c],
                                 model.trigger_messages[c]});
        }
    }
    std::sort(out.begin(), out.end(), [](const Firing& a, const Firing& b) {
        return std::tie(a.position, a.trigger_index) < std::tie(b.position, b.trigger_index);
    });
    return out;
}

std::string model_to_csv(const EvaluationModel& model) {
    std::ostringstream out;
    for (std::size_t c = 0; c < model.node_names.size(); ++c) {
        if (c) out << ',';
        out << model.node_names[c];
    }
    out << '\n';
    for (std::int64_t p = 0; p < model.dump_rows; ++p) {
        for (std::size_t c = 0; c < model.node_names.size(); ++c) {
            if (c) out << ',';
            std::int32_t v = model.values[c][static_cast<std::size_t>(p)];
            if (model.node_types[c] == TypeTag::Bool) {
                out << (v ? "true" : "false");
            } else {
                out << v;
            }
        }
        out << '\n';
    }
    for (const Firing& f : model.firings) {
        if (f.position >= model.dump_rows) continue;
        out << "# trigger," << f.position << ',' << f.trigger_index << ',' << f.message << '\n';
    }
    return out.str();
}

std::uint64_t model_checksum(const EvaluationModel& model) {
    std::uint64_t sum = 0;
    for (std::size_t c = 0; c < model.node_names.size(); ++c) {
        for (std::size_t k = 0; k < model.length; ++k) {
            if (!model.defined[c][k]) continue;
            sum += checksum_cell(static_cast<std::uint32_t>(c), static_cast<std::int64_t>(k),
                                 static_cast<std::uint32_t>(model.values[c][k]));
        }
    }
    return sum;
}

} // namespace lola
