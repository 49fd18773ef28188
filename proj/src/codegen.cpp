#include "lola/codegen.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "lola/diag.hpp"

namespace lola {
namespace {

// ---------------------------------------------------------------------------
// Codegen model: everything the emitter needs, precomputed per node.
// ---------------------------------------------------------------------------

struct NodeInfo {
    int id = 0; // stream table node id
    std::string name;
    TypeTag type = TypeTag::Int32;
    bool is_input = false;
    int shift = 0;
    int layer = 0;
    int slots = 1;
    const Expr* expr = nullptr;
    int trigger_index = -1;
    std::string message;
    // Derived per computed node:
    bool has_div = false;            // expression can fault
    bool has_default_access = false; // some access carries a default
    int stage_depth = 1;             // dump staging ring size
};

struct OpUsage {
    bool add = false, sub = false, mul = false, neg = false, abs = false;
    bool min = false, max = false, to_int = false, land = false, lor = false;
    bool div = false, mod = false;
};

struct Model {
    const TypedSpec* spec = nullptr;
    const AnalysisReport* report = nullptr;
    CodegenOptions opts;
    std::vector<NodeInfo> nodes;               // table order: inputs, then computed
    std::vector<std::vector<int>> layers;      // layers[l-1] = node ids of layer l
    std::vector<AccessPlan> plans;             // by edge index
    std::vector<std::vector<const AccessPlan*>> node_plans; // per node, edge order
    int preflen = 0;
    int postlen = 0;
    std::size_t num_inputs = 0;
    bool any_trigger = false;
    bool any_fault = false;
    OpUsage ops;
};

void scan_ops(const Expr& e, OpUsage& u, NodeInfo& n) {
    switch (e.kind) {
    case Expr::Kind::Literal:
    case Expr::Kind::ConstRef:
        break;
    case Expr::Kind::StreamAccess:
        if (e.dflt.has_value()) n.has_default_access = true;
        break;
    case Expr::Kind::Unary:
        if (e.unary_op == UnaryOp::Negate) u.neg = true;
        break;
    case Expr::Kind::Binary:
        switch (e.binary_op) {
        case BinaryOp::Add: u.add = true; break;
        case BinaryOp::Sub: u.sub = true; break;
        case BinaryOp::Mul: u.mul = true; break;
        case BinaryOp::Div: u.div = true; n.has_div = true; break;
        case BinaryOp::Mod: u.mod = true; n.has_div = true; break;
        case BinaryOp::And: u.land = true; break;
        case BinaryOp::Or: u.lor = true; break;
        default: break;
        }
        break;
    case Expr::Kind::Ite:
        break;
    case Expr::Kind::Call:
        switch (e.builtin) {
        case Builtin::Min: u.min = true; break;
        case Builtin::Max: u.max = true; break;
        case Builtin::Abs: u.abs = true; u.neg = true; break;
        case Builtin::Int: u.to_int = true; break;
        }
        break;
    }
    for (const auto& a : e.args) scan_ops(*a, u, n);
}

Model build_model(const TypedSpec& spec, const AnalysisReport& report,
                  const CodegenOptions& opts) {
    Model m;
    m.spec = &spec;
    m.report = &report;
    m.opts = opts;
    m.preflen = report.preflen;
    m.postlen = report.postlen;
    const StreamTable& table = report.graph.streams;
    m.num_inputs = table.num_inputs;

    int max_layer = 0;
    for (std::size_t id = 0; id < table.size(); ++id) {
        const StreamInfo& info = table[static_cast<int>(id)];
        NodeInfo n;
        n.id = static_cast<int>(id);
        n.name = info.name;
        n.type = info.type;
        n.is_input = info.kind == StreamKind::Input;
        n.shift = report.shift[id];
        n.layer = report.layer[id];
        n.slots = report.memory.slots[id];
        n.expr = info.expr;
        n.trigger_index = info.trigger_index;
        n.message = info.message;
        n.stage_depth = m.postlen - n.shift + 1;
        if (n.expr) scan_ops(*n.expr, m.ops, n);
        if (info.kind == StreamKind::Trigger) m.any_trigger = true;
        if (n.has_div) m.any_fault = true;
        max_layer = std::max(max_layer, n.layer);
        m.nodes.push_back(std::move(n));
    }
    m.layers.assign(static_cast<std::size_t>(max_layer), {});
    for (int id : report.total_order) {
        m.layers[static_cast<std::size_t>(report.layer[id] - 1)].push_back(id);
    }

    m.plans = plan_accesses(spec, report);
    m.node_plans.assign(table.size(), {});
    for (const AccessPlan& p : m.plans) {
        m.node_plans[static_cast<std::size_t>(p.accessor)].push_back(&p);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Small text helpers
// ---------------------------------------------------------------------------

std::string escape_c_string(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += ch; break;
        }
    }
    return out;
}

std::string int_literal(std::int32_t v) {
    if (v == std::numeric_limits<std::int32_t>::min()) return "(-2147483647 - 1)";
    return std::to_string(v);
}

std::string literal_text(const Literal& lit) {
    if (lit.type == TypeTag::Bool) return lit.value ? "true" : "false";
    return int_literal(lit.value);
}

std::string cpp_type(TypeTag t) { return t == TypeTag::Bool ? "bool" : "int32_t"; }

/// `base + k` with k folded into the text ("iter", "iter - 2", "iter + 1").
std::string offset_text(const std::string& base, std::int64_t k) {
    if (k == 0) return base;
    if (k < 0) return base + " - " + std::to_string(-k);
    return base + " + " + std::to_string(k);
}

// ---------------------------------------------------------------------------
// Expression rendering (monitor code)
// ---------------------------------------------------------------------------

enum class Phase { Prefix, Loop, Postfix, Dyn };

struct RenderCtx {
    const Model* m = nullptr;
    Phase phase = Phase::Loop;
    int t = 0; // prefix round
    int j = 0; // postfix round
    const NodeInfo* node = nullptr;
    std::size_t next_plan = 0;
    bool used_mem = false;
    std::string pos; // rendered position expression for checked_div/checked_mod
};

std::string render_expr(const Expr& e, RenderCtx& ctx);

std::string render_access(const Expr& e, RenderCtx& ctx) {
    const AccessPlan& pl = *ctx.m->node_plans[static_cast<std::size_t>(ctx.node->id)]
                                             [ctx.next_plan++];
    const NodeInfo& tgt = ctx.m->nodes[static_cast<std::size_t>(pl.accessed)];
    std::string read = "mem.get_" + tgt.name + "(" + std::to_string(pl.buffer_index) + ")";
    bool reads = true;
    switch (ctx.phase) {
    case Phase::Loop:
        reads = true;
        break;
    case Phase::Prefix:
        reads = pl.prefix_reads[static_cast<std::size_t>(ctx.t)];
        break;
    case Phase::Postfix:
        reads = pl.postfix_reads[static_cast<std::size_t>(ctx.j - 1)];
        break;
    case Phase::Dyn:
        if (!e.dflt.has_value()) {
            ctx.used_mem = true;
            return read;
        }
        ctx.used_mem = true;
        return "((" + offset_text("q", pl.offset) + " < 0 || " + offset_text("q", pl.offset) +
               " > last) ? " + literal_text(*e.dflt) + " : " + read + ")";
    }
    if (!reads) return literal_text(*e.dflt);
    ctx.used_mem = true;
    return read;
}

std::string render_expr(const Expr& e, RenderCtx& ctx) {
    switch (e.kind) {
    case Expr::Kind::Literal:
        return literal_text(e.literal);
    case Expr::Kind::ConstRef:
        throw SpecError(ErrorKind::Internal, e.span, "unresolved constant in codegen");
    case Expr::Kind::StreamAccess:
        return render_access(e, ctx);
    case Expr::Kind::Unary: {
        std::string a = render_expr(*e.args[0], ctx);
        if (e.unary_op == UnaryOp::Negate) return "wrap_neg(" + a + ")";
        return "!" + a;
    }
    case Expr::Kind::Binary: {
        std::string a = render_expr(*e.args[0], ctx);
        std::string b = render_expr(*e.args[1], ctx);
        switch (e.binary_op) {
        case BinaryOp::Add: return "wrap_add(" + a + ", " + b + ")";
        case BinaryOp::Sub: return "wrap_sub(" + a + ", " + b + ")";
        case BinaryOp::Mul: return "wrap_mul(" + a + ", " + b + ")";
        case BinaryOp::Div:
            return "checked_div(" + a + ", " + b + ", " + ctx.pos + ", fault)";
        case BinaryOp::Mod:
            return "checked_mod(" + a + ", " + b + ", " + ctx.pos + ", fault)";
        case BinaryOp::Lt: return "(" + a + " < " + b + ")";
        case BinaryOp::Le: return "(" + a + " <= " + b + ")";
        case BinaryOp::Gt: return "(" + a + " > " + b + ")";
        case BinaryOp::Ge: return "(" + a + " >= " + b + ")";
        case BinaryOp::Eq: return "(" + a + " == " + b + ")";
        case BinaryOp::Ne: return "(" + a + " != " + b + ")";
        case BinaryOp::And: return "land(" + a + ", " + b + ")";
        case BinaryOp::Or: return "lor(" + a + ", " + b + ")";
        }
        break;
    }
    case Expr::Kind::Ite: {
        std::string c = render_expr(*e.args[0], ctx);
        std::string a = render_expr(*e.args[1], ctx);
        std::string b = render_expr(*e.args[2], ctx);
        return "(" + c + " ? " + a + " : " + b + ")";
    }
    case Expr::Kind::Call: {
        std::string a = render_expr(*e.args[0], ctx);
        if (e.builtin == Builtin::Abs) return "wrap_abs(" + a + ")";
        if (e.builtin == Builtin::Int) return "bool_to_int(" + a + ")";
        std::string b = render_expr(*e.args[1], ctx);
        if (e.builtin == Builtin::Min) return "min_i32(" + a + ", " + b + ")";
        return "max_i32(" + a + ", " + b + ")";
    }
    }
    throw SpecError(ErrorKind::Internal, e.span, "unhandled expression kind in codegen");
}

// ---------------------------------------------------------------------------
// Expression rendering over ghost memory (annotation text)
// ---------------------------------------------------------------------------

struct GhostCtx {
    const Model* m = nullptr;
    Phase phase = Phase::Loop;
    int t = 0;
    int j = 0;
    const NodeInfo* node = nullptr;
    std::size_t next_plan = 0;
};

std::string render_ghost(const Expr& e, GhostCtx& ctx) {
    switch (e.kind) {
    case Expr::Kind::Literal:
        return literal_text(e.literal);
    case Expr::Kind::ConstRef:
        throw SpecError(ErrorKind::Internal, e.span, "unresolved constant in annotations");
    case Expr::Kind::StreamAccess: {
        const AccessPlan& pl = *ctx.m->node_plans[static_cast<std::size_t>(ctx.node->id)]
                                                 [ctx.next_plan++];
        const NodeInfo& tgt = ctx.m->nodes[static_cast<std::size_t>(pl.accessed)];
        bool reads = true;
        std::string pos_text;
        switch (ctx.phase) {
        case Phase::Loop: {
            // stream position of the accessor: iter - shift; access: + offset
            pos_text = offset_text("iter", pl.offset - ctx.node->shift);
            reads = true;
            break;
        }
        case Phase::Prefix: {
            reads = pl.prefix_reads[static_cast<std::size_t>(ctx.t)];
            pos_text = std::to_string(ctx.t - ctx.node->shift + pl.offset);
            break;
        }
        case Phase::Postfix: {
            reads = pl.postfix_reads[static_cast<std::size_t>(ctx.j - 1)];
            pos_text = offset_text("n_events", ctx.j - 1 - ctx.node->shift + pl.offset);
            break;
        }
        case Phase::Dyn:
            throw SpecError(ErrorKind::Internal, e.span, "no annotations on the dynamic path");
        }
        if (!reads) return literal_text(*e.dflt);
        return "gm." + tgt.name + "[" + pos_text + "]";
    }
    case Expr::Kind::Unary: {
        std::string a = render_ghost(*e.args[0], ctx);
        if (e.unary_op == UnaryOp::Negate) return "(-" + a + ")";
        return "(!" + a + ")";
    }
    case Expr::Kind::Binary: {
        std::string a = render_ghost(*e.args[0], ctx);
        std::string b = render_ghost(*e.args[1], ctx);
        return "(" + a + " " + binary_op_symbol(e.binary_op) + " " + b + ")";
    }
    case Expr::Kind::Ite: {
        std::string c = render_ghost(*e.args[0], ctx);
        std::string a = render_ghost(*e.args[1], ctx);
        std::string b = render_ghost(*e.args[2], ctx);
        return "(" + c + " ? " + a + " : " + b + ")";
    }
    case Expr::Kind::Call: {
        std::string a = render_ghost(*e.args[0], ctx);
        if (e.builtin == Builtin::Abs) return "abs(" + a + ")";
        if (e.builtin == Builtin::Int) return "int(" + a + ")";
        std::string b = render_ghost(*e.args[1], ctx);
        if (e.builtin == Builtin::Min) return "min(" + a + ", " + b + ")";
        return "max(" + a + ", " + b + ")";
    }
    }
    throw SpecError(ErrorKind::Internal, e.span, "unhandled expression kind in annotations");
}

// ---------------------------------------------------------------------------
// Annotation blocks
// ---------------------------------------------------------------------------

std::string variant_tag(Phase phase, int tj) {
    switch (phase) {
    case Phase::Prefix: return "pre" + std::to_string(tj);
    case Phase::Loop: return "loop";
    case Phase::Postfix: return "post" + std::to_string(tj);
    case Phase::Dyn: return "dyn";
    }
    return "";
}

std::vector<AnnotationBlock> build_annotations(const Model& m) {
    std::vector<AnnotationBlock> blocks;

    AnnotationBlock ghost;
    ghost.anchor = "ghost";
    ghost.lines = {
        "//@ ghost memory: one append-only sequence per stream; the monitor",
        "//@ writes every received or computed value here and never reads it",
        "//@ back (information flows one way, program -> ghost state)",
    };
    blocks.push_back(ghost);

    for (const NodeInfo& n : m.nodes) {
        AnnotationBlock b;
        b.anchor = "getter:" + n.name;
        b.lines.push_back("//@ pure");
        b.lines.push_back("//@ requires index < " + std::to_string(n.slots));
        if (n.slots <= 8) {
            for (int i = 0; i < n.slots; ++i) {
                b.lines.push_back("//@ ensures index == " + std::to_string(i) +
                                  " ==> result == self." + n.name + "[" + std::to_string(i) +
                                  "]");
            }
        } else {
            b.lines.push_back("//@ ensures result == self." + n.name + "[index]");
        }
        blocks.push_back(std::move(b));
    }

    auto eval_marker = [&](Phase phase, int tj, const NodeInfo& n) {
        AnnotationBlock b;
        b.anchor = "eval:" + variant_tag(phase, tj) + ":" + n.name;
        b.lines = {"//@ pure"};
        blocks.push_back(std::move(b));
    };
    auto inline_assert = [&](Phase phase, int tj, const NodeInfo& n) {
        GhostCtx ctx;
        ctx.m = &m;
        ctx.phase = phase;
        ctx.t = tj;
        ctx.j = tj;
        ctx.node = &n;
        AnnotationBlock b;
        b.anchor = "assert:" + variant_tag(phase, tj) + ":" + n.name;
        b.lines = {"//@ assert v_" + n.name + " == " + render_ghost(*n.expr, ctx)};
        blocks.push_back(std::move(b));
    };

    for (std::size_t c = m.num_inputs; c < m.nodes.size(); ++c) {
        const NodeInfo& n = m.nodes[c];
        for (int t = n.shift; t < m.preflen; ++t) {
            eval_marker(Phase::Prefix, t, n);
            inline_assert(Phase::Prefix, t, n);
        }
        eval_marker(Phase::Loop, 0, n);
        inline_assert(Phase::Loop, 0, n);
        for (int j = 1; j <= std::min(n.shift, m.postlen); ++j) {
            eval_marker(Phase::Postfix, j, n);
            inline_assert(Phase::Postfix, j, n);
        }
        if (m.preflen > 0 && m.postlen > 0) {
            eval_marker(Phase::Dyn, 0, n);
        }
    }

    AnnotationBlock entry;
    entry.anchor = "loop-entry";
    entry.lines.push_back("//@ assert iter == " + std::to_string(m.preflen));
    for (const NodeInfo& n : m.nodes) {
        entry.lines.push_back("//@ assert gm." + n.name +
                              ".len() == " + std::to_string(m.preflen - n.shift));
    }
    for (const NodeInfo& n : m.nodes) {
        for (int i = 0; i < n.slots; ++i) {
            int g = n.shift + i + 1;
            entry.lines.push_back("//@ invariant iter >= " + std::to_string(g) + " ==> mem." +
                                  n.name + "[" + std::to_string(i) + "] == gm." + n.name +
                                  "[iter - " + std::to_string(g) + "]");
        }
    }
    blocks.push_back(std::move(entry));
    return blocks;
}

// ---------------------------------------------------------------------------
// The emitter
// ---------------------------------------------------------------------------

class Emitter {
  public:
    Emitter(const Model& m) : m_(m) {
        if (m_.opts.annotations) {
            for (AnnotationBlock& b : build_annotations(m_)) {
                annotations_.emplace(b.anchor, std::move(b.lines));
            }
        }
    }

    EmittedProgram run() {
        prelude();
        ghost_struct();
        memory_struct();
        commit_functions();
        dump_struct();
        io_structs();
        eval_functions();
        reporting_helpers();
        run_function();
        main_function();

        EmittedProgram p;
        p.source = out_.str();
        p.preflen = m_.preflen;
        p.postlen = m_.postlen;
        for (const NodeInfo& n : m_.nodes) p.slots.emplace_back(n.name, n.slots);
        for (const auto& layer : m_.layers) {
            std::vector<std::string> names;
            for (int id : layer) names.push_back(m_.nodes[static_cast<std::size_t>(id)].name);
            p.layers.push_back(std::move(names));
        }
        p.annotation_blocks = annotation_blocks_;
        p.parallel = m_.opts.parallel;
        return p;
    }

  private:
    const Model& m_;
    std::ostringstream out_;
    std::map<std::string, std::vector<std::string>> annotations_;
    int annotation_blocks_ = 0;
    int indent_ = 0;

    bool csv() const { return m_.opts.io_mode == CodegenOptions::IoMode::CsvStdin; }
    bool embedded() const { return !csv(); }
    bool dumping() const { return m_.opts.emit_streams; }
    bool ghost() const { return m_.opts.annotations; }

    void line(const std::string& s = "") {
        if (s.empty()) {
            out_ << '\n';
            return;
        }
        for (int i = 0; i < indent_; ++i) out_ << "    ";
        out_ << s << '\n';
    }
    void open(const std::string& s) {
        line(s);
        ++indent_;
    }
    void close(const std::string& s = "}") {
        --indent_;
        line(s);
    }

    void ann(const std::string& anchor) {
        auto it = annotations_.find(anchor);
        if (it == annotations_.end()) return;
        for (const std::string& l : it->second) line(l);
        ++annotation_blocks_;
    }

    std::vector<const NodeInfo*> computed() const {
        std::vector<const NodeInfo*> out;
        for (std::size_t c = m_.num_inputs; c < m_.nodes.size(); ++c) out.push_back(&m_.nodes[c]);
        return out;
    }

    /// Computed-node ordinal (declaration order) for the bench checksum.
    int ordinal(const NodeInfo& n) const { return n.id - static_cast<int>(m_.num_inputs); }

    // -- sections ----------------------------------------------------------

    void prelude() {
        line("// Generated constant-memory stream monitor. Do not edit.");
        std::string phases = "// phases: prefix=" + std::to_string(m_.preflen) +
                             " loop postfix=" + std::to_string(m_.postlen);
        line(phases);
        line("#include <array>");
        if (embedded()) line("#include <chrono>");
        if (csv()) line("#include <cerrno>");
        line("#include <cstddef>");
        line("#include <cstdint>");
        line("#include <cstdio>");
        if (csv()) line("#include <cstdlib>");
        if (csv()) line("#include <cstring>");
        if (m_.opts.parallel) line("#include <thread>");
        if (ghost()) line("#include <vector>");
        line();
        open("namespace {");
        line();
        line("using std::int32_t;");
        line("using std::int64_t;");
        line("using std::size_t;");
        line("using std::uint32_t;");
        line("using std::uint64_t;");
        line();
        line("// Int32 semantics: two's-complement wrapping arithmetic, truncated");
        line("// division, INT32_MIN / -1 == INT32_MIN, INT32_MIN % -1 == 0.");
        if (m_.ops.add) {
            open("inline int32_t wrap_add(int32_t a, int32_t b) {");
            line("return static_cast<int32_t>(static_cast<uint32_t>(a) + "
                 "static_cast<uint32_t>(b));");
            close();
        }
        if (m_.ops.sub) {
            open("inline int32_t wrap_sub(int32_t a, int32_t b) {");
            line("return static_cast<int32_t>(static_cast<uint32_t>(a) - "
                 "static_cast<uint32_t>(b));");
            close();
        }
        if (m_.ops.mul) {
            open("inline int32_t wrap_mul(int32_t a, int32_t b) {");
            line("return static_cast<int32_t>(static_cast<uint32_t>(a) * "
                 "static_cast<uint32_t>(b));");
            close();
        }
        if (m_.ops.neg) {
            line("inline int32_t wrap_neg(int32_t a) { return "
                 "static_cast<int32_t>(0u - static_cast<uint32_t>(a)); }");
        }
        if (m_.ops.abs) {
            line("inline int32_t wrap_abs(int32_t a) { return a < 0 ? wrap_neg(a) : a; }");
        }
        if (m_.ops.min) {
            line("inline int32_t min_i32(int32_t a, int32_t b) { return a < b ? a : b; }");
        }
        if (m_.ops.max) {
            line("inline int32_t max_i32(int32_t a, int32_t b) { return a > b ? a : b; }");
        }
        if (m_.ops.to_int) {
            line("inline int32_t bool_to_int(bool b) { return b ? 1 : 0; }");
        }
        if (m_.ops.land || m_.ops.lor) {
            line("// and/or are fully strict: both operands are evaluated before the call");
        }
        if (m_.ops.land) line("inline bool land(bool a, bool b) { return a && b; }");
        if (m_.ops.lor) line("inline bool lor(bool a, bool b) { return a || b; }");
        if (m_.ops.div) {
            open("inline int32_t checked_div(int32_t a, int32_t b, int64_t pos, int64_t* fault) {");
            line("if (b == 0) { if (*fault < 0) *fault = pos; return 0; }");
            line("if (b == -1 && a == (-2147483647 - 1)) return (-2147483647 - 1);");
            line("return a / b;");
            close();
        }
        if (m_.ops.mod) {
            open("inline int32_t checked_mod(int32_t a, int32_t b, int64_t pos, int64_t* fault) {");
            line("if (b == 0) { if (*fault < 0) *fault = pos; return 0; }");
            line("if (b == -1) return 0;");
            line("return a % b;");
            close();
        }
        if (embedded()) {
            line();
            line("// Bench checksum: order-insensitive sum of mixed (node, position, value).");
            line("uint64_t g_checksum = 0;");
            if (m_.nodes.size() == m_.num_inputs) {
                line();
                return; // no computed streams: nothing to mix into the checksum
            }
            open("inline uint64_t mix64(uint64_t x) {");
            line("x ^= x >> 30;");
            line("x *= 0xbf58476d1ce4e5b9ULL;");
            line("x ^= x >> 27;");
            line("x *= 0x94d049bb133111ebULL;");
            line("x ^= x >> 31;");
            line("return x;");
            close();
            open("inline void sink(uint32_t node, int64_t pos, uint32_t bits) {");
            line("g_checksum += mix64(static_cast<uint64_t>(node) * 0x9E3779B97F4A7C15ULL ^");
            line("                    static_cast<uint64_t>(pos) * 0xC2B2AE3D27D4EB4FULL ^");
            line("                    static_cast<uint64_t>(bits));");
            close();
        }
        line();
    }

    void ghost_struct() {
        if (!ghost()) return;
        ann("ghost");
        open("struct GhostMemory {");
        for (const NodeInfo& n : m_.nodes) {
            line("std::vector<" + cpp_type(n.type) + "> " + n.name + ";");
        }
        close("};");
        line();
    }

    void memory_struct() {
        line("// Ring buffers, newest committed value at index 0.");
        open("struct Memory {");
        for (const NodeInfo& n : m_.nodes) {
            line("std::array<" + cpp_type(n.type) + ", " + std::to_string(n.slots) + "> m_" +
                 n.name + "{};");
        }
        if (!m_.nodes.empty()) line();
        for (const NodeInfo& n : m_.nodes) {
            ann("getter:" + n.name);
            line(cpp_type(n.type) + " get_" + n.name + "(size_t index) const { return m_" +
                 n.name + "[index]; }");
        }
        close("};");
        line();
    }

    std::string commit_args(const NodeInfo& n) {
        std::string args = "Memory& mem";
        if (ghost()) args += ", GhostMemory& gm";
        args += ", " + cpp_type(n.type) + " v";
        return args;
    }

    void commit_functions() {
        for (const NodeInfo& n : m_.nodes) {
            open("inline void commit_" + n.name + "(" + commit_args(n) + ") {");
            if (n.slots > 1) {
                line("for (size_t i = " + std::to_string(n.slots - 1) +
                     "; i > 0; --i) mem.m_" + n.name + "[i] = mem.m_" + n.name + "[i - 1];");
            }
            line("mem.m_" + n.name + "[0] = v;");
            if (ghost()) line("gm." + n.name + ".push_back(v);");
            close();
        }
        // Placeholder advance: keeps the buffer geometry moving in rounds where
        // the stream produces no value; the written slot is never read.
        bool any_advance = false;
        for (const NodeInfo& n : m_.nodes) {
            bool needed = m_.postlen > 0 && (n.is_input || n.shift < m_.postlen);
            if (!needed) continue;
            any_advance = true;
            open("inline void advance_" + n.name + "(Memory& mem) {");
            if (n.slots > 1) {
                line("for (size_t i = " + std::to_string(n.slots - 1) +
                     "; i > 0; --i) mem.m_" + n.name + "[i] = mem.m_" + n.name + "[i - 1];");
            }
            line("mem.m_" + n.name + "[0] = " + (n.type == TypeTag::Bool ? "false" : "0") + ";");
            close();
        }
        if (any_advance || !m_.nodes.empty()) line();
    }

    void dump_struct() {
        if (!dumping()) return;
        line("// --streams-out staging: ring of computed rows awaiting completion.");
        open("struct Dump {");
        line("std::FILE* out = nullptr;");
        line("std::FILE* comments = nullptr;");
        for (const NodeInfo* n : computed()) {
            line("std::array<" + cpp_type(n->type) + ", " + std::to_string(n->stage_depth) +
                 "> stage_" + n->name + "{};");
        }
        close("};");
        line();
        open("inline bool dump_init(Dump& d, std::FILE* out) {");
        line("d.out = out;");
        line("if (!d.out) return true;");
        line("d.comments = std::tmpfile();");
        open("if (!d.comments) {");
        line("std::fprintf(stderr, \"monitor: cannot create temporary file\\n\");");
        line("return false;");
        close();
        std::string header;
        {
            bool first = true;
            for (const NodeInfo* n : computed()) {
                if (!first) header += ',';
                header += n->name;
                first = false;
            }
        }
        line("std::fputs(\"" + escape_c_string(header) + "\\n\", d.out);");
        line("return true;");
        close();
        line();
        open("inline void dump_row(Dump& d, int64_t p) {");
        line("if (!d.out) return;");
        if (computed().empty()) line("(void)p;");
        {
            auto list = computed();
            for (std::size_t i = 0; i < list.size(); ++i) {
                const NodeInfo* n = list[i];
                std::string cell = "d.stage_" + n->name + "[static_cast<uint64_t>(p) % " +
                                   std::to_string(n->stage_depth) + "]";
                if (i) line("std::fputc(',', d.out);");
                if (n->type == TypeTag::Bool) {
                    line("std::fputs(" + cell + " ? \"true\" : \"false\", d.out);");
                } else {
                    line("std::fprintf(d.out, \"%lld\", static_cast<long long>(" + cell + "));");
                }
            }
        }
        line("std::fputc('\\n', d.out);");
        for (const NodeInfo* n : computed()) {
            if (n->trigger_index < 0) continue;
            open("if (d.stage_" + n->name + "[static_cast<uint64_t>(p) % " +
                 std::to_string(n->stage_depth) + "]) {");
            line("std::fprintf(d.comments, \"# trigger,%lld," + std::to_string(n->trigger_index) +
                 ",%s\\n\", static_cast<long long>(p), \"" + escape_c_string(n->message) +
                 "\");");
            close();
        }
        close();
        line();
        open("inline void dump_finalize(Dump& d) {");
        line("if (!d.out) return;");
        line("std::rewind(d.comments);");
        line("char buf[8192];");
        line("size_t n;");
        open("while ((n = std::fread(buf, 1, sizeof buf, d.comments)) > 0) {");
        line("std::fwrite(buf, 1, n, d.out);");
        close();
        line("std::fclose(d.comments);");
        line("std::fclose(d.out);");
        line("d.out = nullptr;");
        close();
        line();
    }

    void io_structs() {
        open("struct Inputs {");
        for (std::size_t i = 0; i < m_.num_inputs; ++i) {
            const NodeInfo& n = m_.nodes[i];
            line(cpp_type(n.type) + " " + n.name + ";");
        }
        if (m_.num_inputs == 0) line("char unused_;");
        close("};");
        line();
        if (csv()) {
            csv_reader();
        } else {
            embedded_generator();
        }
    }

    void csv_reader() {
        if (m_.num_inputs > 0) {
            line("// Trims spaces/tabs and splits on ','. Returns the cell count.");
            open("inline int split_csv(char* s, char** cells, int max_cells) {");
            line("int n = 0;");
            line("cells[n++] = s;");
            open("while ((s = std::strchr(s, ',')) != nullptr) {");
            line("if (n >= max_cells) return -1;");
            line("*s++ = '\\0';");
            line("cells[n++] = s;");
            close();
            open("for (int i = 0; i < n; ++i) {");
            line("char* c = cells[i];");
            line("while (*c == ' ' || *c == '\\t') ++c;");
            line("size_t len = std::strlen(c);");
            line("while (len > 0 && (c[len - 1] == ' ' || c[len - 1] == '\\t')) c[--len] = "
                 "'\\0';");
            line("cells[i] = c;");
            close();
            line("return n;");
            close();
            line();
        }
        open("inline void chomp(char* s) {");
        line("size_t n = std::strlen(s);");
        line("while (n > 0 && (s[n - 1] == '\\n' || s[n - 1] == '\\r')) s[--n] = '\\0';");
        close();
        line();
        bool any_int = false, any_bool = false;
        for (std::size_t i = 0; i < m_.num_inputs; ++i) {
            (m_.nodes[i].type == TypeTag::Int32 ? any_int : any_bool) = true;
        }
        if (any_int) {
            open("inline bool parse_int32(const char* s, int32_t* out) {");
            line("if (*s == '\\0') return false;");
            line("errno = 0;");
            line("char* end = nullptr;");
            line("long long v = std::strtoll(s, &end, 10);");
            line("if (errno != 0 || end == s || *end != '\\0') return false;");
            line("if (v < -2147483648LL || v > 2147483647LL) return false;");
            line("*out = static_cast<int32_t>(v);");
            line("return true;");
            close();
        }
        if (any_bool) {
            open("inline bool parse_bool(const char* s, bool* out) {");
            line("if (std::strcmp(s, \"true\") == 0 || std::strcmp(s, \"1\") == 0) { *out = true; "
                 "return true; }");
            line("if (std::strcmp(s, \"false\") == 0 || std::strcmp(s, \"0\") == 0) { *out = "
                 "false; return true; }");
            line("return false;");
            close();
        }
        line();
        line("// Reads the trace as CSV from stdin. A malformed header or row is");
        line("// diagnosed on stderr and flags the run as bad (monitor exits 1).");
        open("class InputReader {");
        --indent_;
        line("  public:");
        ++indent_;
        if (m_.num_inputs == 0) {
            open("bool init() {");
            line("if (!std::fgets(buf_, sizeof buf_, stdin)) return false; // length-0 trace");
            line("chomp(buf_);");
            open("if (buf_[0] != '\\0') {");
            line("std::fprintf(stderr, \"monitor: expected an empty header row\\n\");");
            line("bad_ = true;");
            line("return false;");
            close();
            line("return true;");
            close();
            line();
            open("bool next(Inputs&) {");
            line("if (bad_) return false;");
            line("if (!std::fgets(buf_, sizeof buf_, stdin)) return false;");
            line("chomp(buf_);");
            open("if (buf_[0] != '\\0') {");
            line("std::fprintf(stderr, \"monitor: expected an empty row\\n\");");
            line("bad_ = true;");
            line("return false;");
            close();
            line("return true;");
            close();
        } else {
            std::string num = std::to_string(m_.num_inputs);
            open("bool init() {");
            line("if (!std::fgets(buf_, sizeof buf_, stdin)) return false; // length-0 trace");
            line("chomp(buf_);");
            line("char* cells[" + num + " + 1];");
            line("int n = split_csv(buf_, cells, " + num + " + 1);");
            open("if (n != " + num + ") {");
            line("std::fprintf(stderr, \"monitor: header names %d columns, expected " + num +
                 "\\n\", n);");
            line("bad_ = true;");
            line("return false;");
            close();
            line("for (int i = 0; i < " + num + "; ++i) perm_[i] = -1;");
            open("for (int j = 0; j < n; ++j) {");
            line("int slot = -1;");
            open("for (int i = 0; i < " + num + "; ++i) {");
            line("if (std::strcmp(cells[j], kNames[i]) == 0) { slot = i; break; }");
            close();
            open("if (slot < 0 || perm_[slot] >= 0) {");
            line("std::fprintf(stderr, \"monitor: bad header column '%s'\\n\", cells[j]);");
            line("bad_ = true;");
            line("return false;");
            close();
            line("perm_[slot] = j;");
            close();
            line("return true;");
            close();
            line();
            open("bool next(Inputs& ev) {");
            line("if (bad_) return false;");
            line("if (!std::fgets(buf_, sizeof buf_, stdin)) return false;");
            line("chomp(buf_);");
            line("if (buf_[0] == '\\0') return false; // blank line ends the trace");
            line("char* cells[" + num + " + 1];");
            line("int n = split_csv(buf_, cells, " + num + " + 1);");
            open("if (n != " + num + ") {");
            line("std::fprintf(stderr, \"monitor: row has %d cells, expected " + num +
                 "\\n\", n);");
            line("bad_ = true;");
            line("return false;");
            close();
            for (std::size_t i = 0; i < m_.num_inputs; ++i) {
                const NodeInfo& n = m_.nodes[i];
                std::string parse = n.type == TypeTag::Bool ? "parse_bool" : "parse_int32";
                std::string kindname = n.type == TypeTag::Bool ? "Bool" : "Int32";
                open("if (!" + parse + "(cells[perm_[" + std::to_string(i) + "]], &ev." + n.name +
                     ")) {");
                line("std::fprintf(stderr, \"monitor: malformed " + kindname +
                     " cell '%s' in column '" + n.name + "'\\n\", cells[perm_[" +
                     std::to_string(i) + "]]);");
                line("bad_ = true;");
                line("return false;");
                close();
            }
            line("return true;");
            close();
        }
        line();
        line("bool bad() const { return bad_; }");
        line();
        --indent_;
        line("  private:");
        ++indent_;
        if (m_.num_inputs > 0) {
            std::string names = "static constexpr const char* kNames[" +
                                std::to_string(m_.num_inputs) + "] = {";
            for (std::size_t i = 0; i < m_.num_inputs; ++i) {
                if (i) names += ", ";
                names += "\"" + escape_c_string(m_.nodes[i].name) + "\"";
            }
            names += "};";
            line(names);
            line("int perm_[" + std::to_string(m_.num_inputs) + "] = {};");
        }
        line("char buf_[65536];");
        line("bool bad_ = false;");
        close("};");
        line();
    }

    void embedded_generator() {
        line("constexpr int64_t kEvents = " + std::to_string(m_.opts.embedded_events) + ";");
        line("constexpr int32_t kIntLo = " + int_literal(m_.opts.embedded_int_lo) + ";");
        line("constexpr int32_t kIntHi = " + int_literal(m_.opts.embedded_int_hi) + ";");
        line("constexpr uint64_t kSeed = " + std::to_string(m_.opts.embedded_seed) + "ULL;");
        line();
        line("// xorshift64*: the toolchain's pinned trace PRNG (seed 0 is remapped).");
        open("class InputReader {");
        --indent_;
        line("  public:");
        ++indent_;
        line("bool init() { return true; }");
        line();
        open("bool next(Inputs& ev) {");
        line("if (produced_ >= kEvents) return false;");
        line("++produced_;");
        for (std::size_t i = 0; i < m_.num_inputs; ++i) {
            const NodeInfo& n = m_.nodes[i];
            if (n.type == TypeTag::Bool) {
                line("ev." + n.name + " = (next_raw() & 1) != 0;");
            } else {
                line("ev." + n.name + " = draw_int32();");
            }
        }
        if (m_.num_inputs == 0) line("(void)ev;");
        line("return true;");
        close();
        line();
        line("bool bad() const { return false; }");
        line();
        --indent_;
        line("  private:");
        ++indent_;
        open("uint64_t next_raw() {");
        line("state_ ^= state_ >> 12;");
        line("state_ ^= state_ << 25;");
        line("state_ ^= state_ >> 27;");
        line("return state_ * 2685821657736338717ULL;");
        close();
        open("int32_t draw_int32() {");
        line("uint64_t span = static_cast<uint64_t>(static_cast<int64_t>(kIntHi) - kIntLo + 1);");
        line("return static_cast<int32_t>(kIntLo + static_cast<int64_t>(next_raw() % span));");
        close();
        line("uint64_t state_ = kSeed != 0 ? kSeed : 0x9E3779B97F4A7C15ULL;");
        line("int64_t produced_ = 0;");
        close("};");
        line();
    }

    // -- eval function emission ---------------------------------------------

    struct Variant {
        Phase phase;
        int tj; // t for prefix, j for postfix
    };

    std::string variant_name(const NodeInfo& n, const Variant& v) const {
        return "eval_" + variant_tag(v.phase, v.tj) + "_" + n.name;
    }

    void emit_eval(const NodeInfo& n, const Variant& v) {
        RenderCtx ctx;
        ctx.m = &m_;
        ctx.phase = v.phase;
        ctx.t = v.tj;
        ctx.j = v.tj;
        ctx.node = &n;
        switch (v.phase) {
        case Phase::Prefix: ctx.pos = std::to_string(v.tj - n.shift); break;
        case Phase::Loop:
        case Phase::Postfix: ctx.pos = "pos"; break;
        case Phase::Dyn: ctx.pos = "q"; break;
        }
        std::string body = render_expr(*n.expr, ctx);

        bool wants_bounds = v.phase == Phase::Dyn && n.has_default_access;
        bool wants_q = v.phase == Phase::Dyn && (wants_bounds || n.has_div);
        bool wants_pos = (v.phase == Phase::Loop || v.phase == Phase::Postfix) && n.has_div;
        std::string sig = "inline " + cpp_type(n.type) + " " + variant_name(n, v) +
                          "(const Memory&" + (ctx.used_mem ? " mem" : "");
        if (wants_pos) sig += ", int64_t pos";
        if (wants_q) sig += ", int64_t q";
        if (wants_bounds) sig += ", int64_t last";
        if (n.has_div) sig += ", int64_t* fault";
        sig += ") {";
        ann("eval:" + variant_tag(v.phase, v.tj) + ":" + n.name);
        open(sig);
        line("return " + body + ";");
        close();
    }

    void eval_functions() {
        for (const NodeInfo* n : computed()) {
            for (int t = n->shift; t < m_.preflen; ++t) {
                emit_eval(*n, Variant{Phase::Prefix, t});
            }
            emit_eval(*n, Variant{Phase::Loop, 0});
            for (int j = 1; j <= std::min(n->shift, m_.postlen); ++j) {
                emit_eval(*n, Variant{Phase::Postfix, j});
            }
            if (m_.preflen > 0 && m_.postlen > 0) {
                emit_eval(*n, Variant{Phase::Dyn, 0});
            }
            line();
        }
    }

    void reporting_helpers() {
        if (m_.any_trigger && csv()) {
            open("inline void report_trigger(int64_t pos, int idx, const char* msg) {");
            line("std::printf(\"%lld,%d,%s\\n\", static_cast<long long>(pos), idx, msg);");
            close();
            line();
        }
        if (m_.any_fault) {
            std::string sig = "inline int fail_fault(";
            if (dumping()) sig += "Dump& dump, ";
            sig += "const char* stream, int64_t pos) {";
            open(sig);
            if (dumping()) line("dump_finalize(dump);");
            line("std::fprintf(stderr, \"runtime error: division by zero in %s at position "
                 "%lld\\n\", stream, static_cast<long long>(pos));");
            line("return 2;");
            close();
            line();
        }
    }

    // -- run(): phases -------------------------------------------------------

    std::string commit_call(const NodeInfo& n, const std::string& value) {
        std::string args = "mem";
        if (ghost()) args += ", gm";
        return "commit_" + n.name + "(" + args + ", " + value + ");";
    }

    std::string eval_call(const NodeInfo& n, const Variant& v, const std::string& pos_expr) {
        // Mirrors the signature choices in emit_eval.
        bool wants_bounds = v.phase == Phase::Dyn && n.has_default_access;
        bool wants_q = v.phase == Phase::Dyn && (wants_bounds || n.has_div);
        bool wants_pos = (v.phase == Phase::Loop || v.phase == Phase::Postfix) && n.has_div;
        std::string call = variant_name(n, v) + "(mem";
        if (wants_pos) call += ", " + pos_expr;
        if (wants_q) call += ", " + pos_expr;
        if (wants_bounds) call += ", last";
        if (n.has_div) call += ", &f_" + n.name;
        call += ")";
        return call;
    }

    /// Stream position expression of node n in the given phase instance.
    std::string position_expr(const NodeInfo& n, const Variant& v) {
        switch (v.phase) {
        case Phase::Prefix: return std::to_string(v.tj - n.shift);
        case Phase::Loop: return offset_text("iter", -n.shift);
        case Phase::Postfix: return offset_text("n_events", v.tj - 1 - n.shift);
        case Phase::Dyn: return "q_" + n.name;
        }
        return "";
    }

    void emit_input_commits(bool placeholder) {
        for (std::size_t i = 0; i < m_.num_inputs; ++i) {
            const NodeInfo& n = m_.nodes[i];
            if (placeholder) {
                line("advance_" + n.name + "(mem);");
            } else {
                line(commit_call(n, "ev." + n.name));
            }
        }
    }

    void emit_fault_check(const NodeInfo& n) {
        std::string call = "fail_fault(";
        if (dumping()) call += "dump, ";
        call += "\"" + escape_c_string(n.name) + "\", f_" + n.name + ")";
        line("if (f_" + n.name + " >= 0) return " + call + ";");
    }

    void emit_stage(const NodeInfo& n, const std::string& pos_expr) {
        if (!dumping()) return;
        open("if (dump.out) {");
        line("dump.stage_" + n.name + "[static_cast<uint64_t>(" + pos_expr + ") % " +
             std::to_string(n.stage_depth) + "] = v_" + n.name + ";");
        close();
    }

    void emit_sink(const NodeInfo& n, const std::string& pos_expr) {
        if (!embedded()) return;
        std::string bits = n.type == TypeTag::Bool ? ("(v_" + n.name + " ? 1u : 0u)")
                                                   : ("static_cast<uint32_t>(v_" + n.name + ")");
        line("sink(" + std::to_string(ordinal(n)) + "u, " + pos_expr + ", " + bits + ");");
    }

    void emit_trigger_print(const NodeInfo& n, const std::string& pos_expr,
                            const std::string& guard) {
        if (n.trigger_index < 0 || !csv()) return;
        std::string cond = guard.empty() ? ("v_" + n.name) : (guard + " && v_" + n.name);
        line("if (" + cond + ") report_trigger(" + pos_expr + ", " +
             std::to_string(n.trigger_index) + ", \"" + escape_c_string(n.message) + "\");");
    }

    /// One layer of one specialized round (prefix round t, loop, postfix j).
    void emit_layer(const std::vector<int>& members, const Variant& v, int layer_no) {
        std::vector<const NodeInfo*> active;
        std::vector<const NodeInfo*> finished; // postfix: placeholder advance
        for (int id : members) {
            const NodeInfo& n = m_.nodes[static_cast<std::size_t>(id)];
            bool on = true;
            if (v.phase == Phase::Prefix) on = n.shift <= v.tj;
            if (v.phase == Phase::Postfix) on = n.shift >= v.tj;
            if (on) {
                active.push_back(&n);
            } else if (v.phase == Phase::Postfix) {
                finished.push_back(&n);
            }
        }
        if (active.empty() && finished.empty()) return;
        std::string label = "// layer " + std::to_string(layer_no);
        bool parallel_here = m_.opts.parallel && v.phase == Phase::Loop && active.size() >= 2;
        if (parallel_here) label += " (parallel)";
        open("{ " + label);
        for (const NodeInfo* n : finished) {
            line("advance_" + n->name + "(mem);");
        }
        for (const NodeInfo* n : active) {
            if (n->has_div) line("int64_t f_" + n->name + " = -1;");
        }
        if (parallel_here) {
            for (const NodeInfo* n : active) {
                line(cpp_type(n->type) + " v_" + n->name + " = " +
                     (n->type == TypeTag::Bool ? "false" : "0") + ";");
            }
            for (const NodeInfo* n : active) {
                line("std::thread th_" + n->name + "([&] { v_" + n->name + " = " +
                     eval_call(*n, v, position_expr(*n, v)) + "; });");
            }
            for (const NodeInfo* n : active) {
                line("th_" + n->name + ".join();");
            }
            for (const NodeInfo* n : active) {
                if (n->has_div) emit_fault_check(*n);
            }
        } else {
            for (const NodeInfo* n : active) {
                line("const " + cpp_type(n->type) + " v_" + n->name + " = " +
                     eval_call(*n, v, position_expr(*n, v)) + ";");
                if (n->has_div) emit_fault_check(*n);
            }
        }
        for (const NodeInfo* n : active) {
            line(commit_call(*n, "v_" + n->name));
        }
        for (const NodeInfo* n : active) {
            emit_stage(*n, position_expr(*n, v));
            emit_sink(*n, position_expr(*n, v));
        }
        for (const NodeInfo* n : active) {
            ann("assert:" + variant_tag(v.phase, v.tj) + ":" + n->name);
        }
        for (const NodeInfo* n : active) {
            emit_trigger_print(*n, position_expr(*n, v), "");
        }
        close();
    }

    void emit_round_layers(const Variant& v) {
        for (std::size_t l = 0; l < m_.layers.size(); ++l) {
            emit_layer(m_.layers[l], v, static_cast<int>(l) + 1);
        }
    }

    void emit_dump_row(const std::string& expr) {
        if (!dumping()) return;
        line("dump_row(dump, " + expr + ");");
    }

    /// The dynamic epilogue round body (inside `for (int64_t t = ...)`).
    void emit_epilogue_round() {
        emit_input_commits(true);
        for (std::size_t l = 0; l < m_.layers.size(); ++l) {
            std::vector<const NodeInfo*> members;
            for (int id : m_.layers[l]) members.push_back(&m_.nodes[static_cast<std::size_t>(id)]);
            if (members.empty()) continue;
            open("{ // layer " + std::to_string(l + 1));
            for (const NodeInfo* n : members) {
                line("const int64_t q_" + n->name + " = " + offset_text("t", -n->shift) + ";");
                line("const bool run_" + n->name + " = q_" + n->name + " >= 0 && q_" + n->name +
                     " <= last;");
                line(cpp_type(n->type) + " v_" + n->name + " = " +
                     (n->type == TypeTag::Bool ? "false" : "0") + ";");
                if (n->has_div) line("int64_t f_" + n->name + " = -1;");
                open("if (run_" + n->name + ") {");
                line("v_" + n->name + " = " + eval_call(*n, Variant{Phase::Dyn, 0}, "q_" + n->name) +
                     ";");
                if (n->has_div) emit_fault_check(*n);
                close();
            }
            for (const NodeInfo* n : members) {
                open("if (run_" + n->name + ") {");
                line(commit_call(*n, "v_" + n->name));
                emit_stage(*n, "q_" + n->name);
                emit_sink(*n, "q_" + n->name);
                close();
                if (n->shift < m_.postlen) {
                    line("else if (q_" + n->name + " > last) advance_" + n->name + "(mem);");
                }
            }
            for (const NodeInfo* n : members) {
                emit_trigger_print(*n, "q_" + n->name, "run_" + n->name);
            }
            close();
        }
        if (dumping()) {
            line("const int64_t p_row = " + offset_text("t", -m_.postlen) + ";");
            line("if (p_row >= 0 && p_row <= last) dump_row(dump, p_row);");
        }
    }

    void run_function() {
        std::string sig = "int run(";
        if (dumping()) sig += "std::FILE* streams_out";
        sig += ") {";
        open(sig);
        line("Memory mem{};");
        if (ghost()) line("GhostMemory gm{};");
        if (dumping()) {
            line("Dump dump{};");
            line("if (!dump_init(dump, streams_out)) return 3;");
        }
        line("InputReader io;");
        line("Inputs ev{};");
        line("int64_t iter = 0;");
        line("bool end_of_input = false;");
        line();
        open("if (!io.init()) {");
        emit_bad_check();
        line("end_of_input = true;");
        close();
        line();
        for (int t = 0; t < m_.preflen; ++t) {
            line("// ---- prefix round " + std::to_string(t) + " ----");
            open("if (!end_of_input) {");
            open("if (!io.next(ev)) {");
            emit_bad_check();
            line("end_of_input = true;");
            close("} else {");
            ++indent_;
            emit_input_commits(false);
            emit_round_layers(Variant{Phase::Prefix, t});
            if (t >= m_.postlen) emit_dump_row(std::to_string(t - m_.postlen));
            line("++iter;");
            --indent_;
            line("}");
            close();
            line();
        }
        open("if (!end_of_input) {");
        ann("loop-entry");
        line("// ---- monitor loop ----");
        open("while (io.next(ev)) {");
        emit_input_commits(false);
        emit_round_layers(Variant{Phase::Loop, 0});
        emit_dump_row(offset_text("iter", -m_.postlen));
        line("++iter;");
        close();
        emit_bad_check();
        if (m_.postlen > 0) {
            line("const int64_t n_events = iter;");
            for (int j = 1; j <= m_.postlen; ++j) {
                line("// ---- postfix round " + std::to_string(j) + " ----");
                open("{");
                emit_input_commits(true);
                emit_round_layers(Variant{Phase::Postfix, j});
                emit_dump_row(offset_text("iter", -m_.postlen));
                line("++iter;");
                close();
            }
        }
        if (m_.preflen > 0 && m_.postlen > 0) {
            close("} else {");
            ++indent_;
            line("// trace ended inside the prefix: evaluate the remainder with");
            line("// dynamic bounds (same buffer geometry, runtime range checks)");
            line("const int64_t n_events = iter;");
            line("const int64_t last = n_events - 1;");
            line("(void)last;");
            open("for (int64_t t = n_events; t < n_events + " + std::to_string(m_.postlen) +
                 "; ++t) {");
            emit_epilogue_round();
            close();
            --indent_;
            line("}");
        } else {
            close();
        }
        line();
        line("(void)iter;");
        if (dumping()) line("dump_finalize(dump);");
        line("return 0;");
        close();
        line();
    }

    void emit_bad_check() {
        if (!csv()) return;
        std::string fin = dumping() ? "dump_finalize(dump); " : "";
        line("if (io.bad()) { " + fin + "return 1; }");
    }

    void main_function() {
        close("} // namespace");
        line();
        if (embedded()) {
            open("int main() {");
            line("const std::chrono::steady_clock::time_point t0 = "
                 "std::chrono::steady_clock::now();");
            line(dumping() ? "int rc = run(nullptr);" : "int rc = run();");
            line("const std::chrono::steady_clock::time_point t1 = "
                 "std::chrono::steady_clock::now();");
            line("long long ns = "
                 "std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();");
            line("std::printf(\"# bench events=%lld ns=%lld checksum=%016llx\\n\",");
            line("            static_cast<long long>(kEvents), ns,");
            line("            static_cast<unsigned long long>(g_checksum));");
            line("return rc;");
            close();
            return;
        }
        open("int main(int argc, char** argv) {");
        if (dumping()) {
            line("const char* streams_path = nullptr;");
            open("for (int i = 1; i < argc; ++i) {");
            open("if (std::strcmp(argv[i], \"--streams-out\") == 0 && i + 1 < argc) {");
            line("streams_path = argv[++i];");
            line("continue;");
            close();
            line("std::fprintf(stderr, \"usage: %s [--streams-out <path>]\\n\", argv[0]);");
            line("return 3;");
            close();
            line("std::FILE* streams_out = nullptr;");
            open("if (streams_path != nullptr) {");
            line("streams_out = std::fopen(streams_path, \"w\");");
            open("if (!streams_out) {");
            line("std::fprintf(stderr, \"monitor: cannot open '%s'\\n\", streams_path);");
            line("return 3;");
            close();
            close();
            line("return run(streams_out);");
        } else {
            open("if (argc > 1) {");
            line("std::fprintf(stderr, \"usage: %s\\n\", argv[0]);");
            line("return 3;");
            close();
            line("return run();");
        }
        close();
    }
};

} // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

std::vector<AccessPlan> plan_accesses(const TypedSpec& spec, const AnalysisReport& report) {
    (void)spec;
    const DependencyGraph& graph = report.graph;
    std::vector<AccessPlan> plans;
    plans.reserve(graph.edges.size());
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        const AccessEdge& e = graph.edges[i];
        const SyncEdge& s = report.sync_edges[i];
        if (s.edge_index != i) {
            throw SpecError(ErrorKind::Internal, Span{0, 0}, "sync edge order mismatch");
        }
        AccessPlan p;
        p.edge_index = i;
        p.accessor = e.accessor;
        p.accessed = e.accessed;
        p.offset = e.offset;
        p.sync_distance = s.distance;
        bool accessed_is_input = graph.streams.is_input(e.accessed);
        p.committed =
            accessed_is_input || report.layer[e.accessed] < report.layer[e.accessor];
        p.buffer_index = p.committed ? s.distance : s.distance - 1;
        if (p.buffer_index < 0 ||
            p.buffer_index >= report.memory.slots[static_cast<std::size_t>(e.accessed)]) {
            throw SpecError(ErrorKind::Internal, Span{0, 0},
                            "access plan buffer index out of range");
        }
        int shift_accessor = report.shift[e.accessor];
        int shift_accessed = report.shift[e.accessed];
        p.prefix_reads.resize(static_cast<std::size_t>(report.preflen));
        for (int t = 0; t < report.preflen; ++t) {
            // position read in prefix round t: (t - shift) + w; negative -> default
            p.prefix_reads[static_cast<std::size_t>(t)] = t - shift_accessor + e.offset >= 0;
        }
        p.postfix_reads.resize(static_cast<std::size_t>(report.postlen));
        for (int j = 1; j <= report.postlen; ++j) {
            // position read in postfix round j exceeds N iff j > d + shift(accessed)
            p.postfix_reads[static_cast<std::size_t>(j - 1)] =
                j <= s.distance + shift_accessed;
        }
        plans.push_back(std::move(p));
    }
    return plans;
}

std::vector<AnnotationBlock> emit_annotations(const TypedSpec& spec,
                                              const AnalysisReport& report) {
    CodegenOptions opts;
    opts.annotations = true;
    Model m = build_model(spec, report, opts);
    return build_annotations(m);
}

EmittedProgram generate(const TypedSpec& spec, const AnalysisReport& report,
                        const CodegenOptions& options) {
    Model m = build_model(spec, report, options);
    Emitter emitter(m);
    return emitter.run();
}

std::string render_report(const EmittedProgram& program) {
    if (program.slots.empty()) {
        return "no streams; trivial monitor";
    }
    std::ostringstream out;
    out << "prefix=" << program.preflen << " loop postfix=" << program.postlen << "; memory: ";
    for (std::size_t i = 0; i < program.slots.size(); ++i) {
        if (i) out << ", ";
        out << program.slots[i].first << "\u00d7" << program.slots[i].second;
    }
    out << "; layers:";
    for (const auto& layer : program.layers) {
        out << " [";
        for (std::size_t i = 0; i < layer.size(); ++i) {
            if (i) out << ", ";
            out << layer[i];
        }
        out << "]";
    }
    out << "; parallel=" << (program.parallel ? "on" : "off");
    if (program.annotation_blocks > 0) {
        out << "; annotation blocks=" << program.annotation_blocks;
    }
    return out.str();
}

} // namespace lola
