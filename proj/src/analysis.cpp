#include "lola/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>

#include "lola/pretty.hpp"

namespace lola {

namespace {

void collect_accesses(const Expr& e, int accessor, const StreamTable& table,
                      std::vector<AccessEdge>& edges) {
    if (e.kind == Expr::Kind::StreamAccess) {
        auto it = table.index_of.find(e.name);
        if (it == table.index_of.end())
            throw SpecError(ErrorKind::Internal, e.span,
                            "internal: unresolved stream '" + e.name + "' in typed spec");
        edges.push_back(AccessEdge{accessor, e.offset, it->second, e.span});
    }
    for (const auto& a : e.args) collect_accesses(*a, accessor, table, edges);
}

std::string render_positive_cycle(const DependencyGraph& graph, const CycleError& err) {
    std::ostringstream out;
    out << "positive-weight cycle: ";
    std::int64_t total = 0;
    for (std::size_t i = 0; i < err.nodes.size(); ++i) {
        const AccessEdge& e = graph.edges[err.edge_indices[i]];
        total += e.offset;
        out << graph.streams[err.nodes[i]].name << " -[" << (e.offset >= 0 ? "+" : "")
            << e.offset << "]-> ";
    }
    out << graph.streams[err.nodes[0]].name << " (total weight +" << total << ")";
    return out.str();
}

std::string render_zero_cycle(const DependencyGraph& graph, const CycleError& err) {
    std::ostringstream out;
    out << "zero-sync-distance cycle: ";
    for (int node : err.nodes) out << graph.streams[node].name << " -[d=0]-> ";
    out << graph.streams[err.nodes[0]].name;
    return out.str();
}

// Longest-path fixpoint for shift(s) = max(0, max{w + shift(s')}). Returns
// false when a positive cycle prevents convergence; in that case *cycle_out
// (if non-null) receives a witness.
bool shift_fixpoint(const DependencyGraph& graph, std::vector<int>& shift,
                    CycleError* cycle_out) {
    const std::size_t n = graph.streams.size();
    shift.assign(n, 0);
    std::vector<std::size_t> pred(n, SIZE_MAX);

    bool changed = false;
    for (std::size_t iter = 0; iter <= n; ++iter) {
        changed = false;
        for (std::size_t i = 0; i < graph.edges.size(); ++i) {
            const AccessEdge& e = graph.edges[i];
            int candidate = e.offset + shift[e.accessed];
            if (candidate > shift[e.accessor]) {
                shift[e.accessor] = candidate;
                pred[e.accessor] = i;
                changed = true;
            }
        }
        if (!changed) return true;
    }

    if (cycle_out) {
        // Some node kept improving; walking predecessor edges n times lands
        // inside a (necessarily positive-weight) cycle.
        int v = -1;
        for (std::size_t i = 0; i < graph.edges.size() && v < 0; ++i) {
            const AccessEdge& e = graph.edges[i];
            if (e.offset + shift[e.accessed] > shift[e.accessor]) v = e.accessor;
        }
        for (std::size_t i = 0; i < n && v >= 0; ++i) v = graph.edges[pred[v]].accessed;
        // Collect the cycle through predecessor edges.
        std::vector<int> nodes;
        std::vector<std::size_t> edges;
        int u = v;
        do {
            std::size_t e = pred[u];
            nodes.push_back(u);
            edges.push_back(e);
            u = graph.edges[e].accessed;
        } while (u != v);
        cycle_out->kind = CycleError::Kind::PositiveCycle;
        cycle_out->nodes = std::move(nodes);
        cycle_out->edge_indices = std::move(edges);
    }
    return false;
}

// Finds one cycle in the zero-distance subgraph (edges accessor -> accessed
// restricted to computed nodes), if any. Returns true and fills `err`.
bool find_zero_cycle(const DependencyGraph& graph, const std::vector<SyncEdge>& sync,
                     CycleError& err) {
    const std::size_t n = graph.streams.size();
    std::vector<std::vector<std::pair<int, std::size_t>>> adj(n);  // node -> (accessed, edge)
    for (const SyncEdge& s : sync) {
        if (s.distance == 0 && !graph.streams.is_input(s.accessed))
            adj[s.accessor].push_back({s.accessed, s.edge_index});
    }

    enum { White, Grey, Black };
    std::vector<int> color(n, White);
    std::vector<int> stack_nodes;
    std::vector<std::size_t> stack_edges;

    // Iterative DFS keeping the grey path for witness extraction.
    struct Frame {
        int node;
        std::size_t next = 0;
    };
    for (std::size_t root = graph.streams.num_inputs; root < n; ++root) {
        if (color[root] != White) continue;
        std::vector<Frame> frames{{static_cast<int>(root)}};
        color[root] = Grey;
        stack_nodes.push_back(static_cast<int>(root));
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < adj[f.node].size()) {
                auto [to, edge] = adj[f.node][f.next++];
                if (color[to] == White) {
                    color[to] = Grey;
                    frames.push_back({to});
                    stack_nodes.push_back(to);
                    stack_edges.push_back(edge);
                } else if (color[to] == Grey) {
                    // Cycle: suffix of stack_nodes from `to` onwards, plus the
                    // closing edge.
                    auto it = std::find(stack_nodes.begin(), stack_nodes.end(), to);
                    std::size_t start = static_cast<std::size_t>(it - stack_nodes.begin());
                    err.kind = CycleError::Kind::ZeroSyncCycle;
                    err.nodes.assign(stack_nodes.begin() + start, stack_nodes.end());
                    err.edge_indices.assign(stack_edges.begin() + start, stack_edges.end());
                    err.edge_indices.push_back(edge);
                    // Witness reads accessor -> accessed; reverse so it follows
                    // evaluation-order arrows consistently.
                    return true;
                }
            } else {
                color[f.node] = Black;
                frames.pop_back();
                stack_nodes.pop_back();
                if (!stack_edges.empty() && !frames.empty()) stack_edges.pop_back();
            }
        }
    }
    return false;
}

} // namespace

DependencyGraph build_dependency_graph(const TypedSpec& spec) {
    DependencyGraph graph;
    graph.streams = build_stream_table(spec);
    for (std::size_t id = graph.streams.num_inputs; id < graph.streams.size(); ++id) {
        const StreamInfo& info = graph.streams[static_cast<int>(id)];
        collect_accesses(*info.expr, static_cast<int>(id), graph.streams, graph.edges);
    }
    return graph;
}

WellFormednessVerdict check_well_formed(const DependencyGraph& graph) {
    WellFormednessVerdict verdict;
    std::vector<int> shift;
    CycleError cycle;
    if (!shift_fixpoint(graph, shift, &cycle)) {
        cycle.message = render_positive_cycle(graph, cycle);
        verdict.ok = false;
        verdict.errors.push_back(std::move(cycle));
        return verdict;
    }
    auto sync = synchronize_edges(graph, shift);
    CycleError zero;
    if (find_zero_cycle(graph, sync, zero)) {
        zero.message = render_zero_cycle(graph, zero);
        verdict.ok = false;
        verdict.errors.push_back(std::move(zero));
    }
    return verdict;
}

std::vector<int> compute_shifts(const DependencyGraph& graph) {
    std::vector<int> shift;
    if (!shift_fixpoint(graph, shift, nullptr))
        throw SpecError(ErrorKind::Internal, {},
                        "internal: positive cycle escaped well-formedness check");
    return shift;
}

std::vector<SyncEdge> synchronize_edges(const DependencyGraph& graph,
                                        const std::vector<int>& shifts) {
    std::vector<SyncEdge> out;
    out.reserve(graph.edges.size());
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        const AccessEdge& e = graph.edges[i];
        int d = shifts[e.accessor] - e.offset - shifts[e.accessed];
        if (d < 0)
            throw SpecError(ErrorKind::Internal, e.span,
                            "internal: negative sync distance " + std::to_string(d));
        out.push_back(SyncEdge{e.accessor, d, e.accessed, i});
    }
    return out;
}

LayerResult compute_layers(const DependencyGraph& graph, const std::vector<SyncEdge>& sync) {
    const std::size_t n = graph.streams.size();
    const std::size_t first = graph.streams.num_inputs;
    LayerResult result;
    result.layer.assign(n, 0);

    // Kahn's algorithm over zero-distance edges among computed nodes,
    // propagating longest-chain depth.
    std::vector<std::vector<int>> successors(n);  // accessed -> accessors
    std::vector<int> indegree(n, 0);
    for (const SyncEdge& s : sync) {
        if (s.distance == 0 && !graph.streams.is_input(s.accessed)) {
            successors[s.accessed].push_back(s.accessor);
            ++indegree[s.accessor];
        }
    }
    std::deque<int> ready;
    for (std::size_t id = first; id < n; ++id)
        if (indegree[id] == 0) {
            ready.push_back(static_cast<int>(id));
            result.layer[id] = 1;
        }
    std::size_t seen = 0;
    while (!ready.empty()) {
        int node = ready.front();
        ready.pop_front();
        ++seen;
        for (int succ : successors[node]) {
            result.layer[succ] = std::max(result.layer[succ], result.layer[node] + 1);
            if (--indegree[succ] == 0) ready.push_back(succ);
        }
    }
    if (seen != n - first)
        throw SpecError(ErrorKind::Internal, {},
                        "internal: zero-distance cycle escaped well-formedness check");

    result.total_order.reserve(n - first);
    for (std::size_t id = first; id < n; ++id) result.total_order.push_back(static_cast<int>(id));
    std::stable_sort(result.total_order.begin(), result.total_order.end(),
                     [&](int a, int b) { return result.layer[a] < result.layer[b]; });
    return result;
}

MemoryPlan compute_memory(const DependencyGraph& graph, const std::vector<SyncEdge>& sync) {
    const std::size_t n = graph.streams.size();
    MemoryPlan plan;
    plan.memreq.assign(n, 0);
    plan.memreq_formula.assign(n, 0);
    for (const SyncEdge& s : sync) {
        plan.memreq[s.accessed] = std::max(plan.memreq[s.accessed], s.distance);
        plan.memreq_formula[s.accessor] = std::max(plan.memreq_formula[s.accessor], s.distance);
    }
    plan.slots.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        plan.slots[i] = plan.memreq[i] + 1;
        plan.memcon_bytes += static_cast<std::size_t>(plan.slots[i]) *
                             size_of(graph.streams[static_cast<int>(i)].type);
    }
    return plan;
}

PhaseLengths compute_phase_lengths(const std::vector<int>& shifts,
                                   const std::vector<int>& memreq) {
    PhaseLengths lengths;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        lengths.preflen = std::max(lengths.preflen, shifts[i] + memreq[i]);
        lengths.postlen = std::max(lengths.postlen, shifts[i]);
    }
    return lengths;
}

namespace {

void collect_division_lints(const Expr& e, std::vector<Lint>& lints) {
    if (e.kind == Expr::Kind::Binary &&
        (e.binary_op == BinaryOp::Div || e.binary_op == BinaryOp::Mod)) {
        const Expr& rhs = *e.args[1];
        bool safe = rhs.kind == Expr::Kind::Literal && rhs.literal.value != 0;
        if (!safe) {
            lints.push_back(Lint{"possible-division-by-zero", e.span,
                                 "possible division by zero in '" + pretty_expr(e) + "'"});
        }
    }
    for (const auto& a : e.args) collect_division_lints(*a, lints);
}

} // namespace

std::vector<Lint> lint(const TypedSpec& spec, const DependencyGraph& graph) {
    std::vector<Lint> lints;
    for (std::size_t id = graph.streams.num_inputs; id < graph.streams.size(); ++id)
        collect_division_lints(*graph.streams[static_cast<int>(id)].expr, lints);

    std::vector<bool> accessed(graph.streams.size(), false);
    for (const AccessEdge& e : graph.edges) accessed[static_cast<std::size_t>(e.accessed)] = true;
    for (std::size_t id = graph.streams.num_inputs; id < graph.streams.size(); ++id) {
        const StreamInfo& info = graph.streams[static_cast<int>(id)];
        if (info.kind == StreamKind::Output && !accessed[id]) {
            lints.push_back(Lint{"unused-stream", info.span,
                                 "output stream '" + info.name +
                                     "' is never accessed and never used by a trigger"});
        }
    }
    (void)spec;
    return lints;
}

AnalysisReport analyze(const TypedSpec& spec) {
    AnalysisReport report;
    report.graph = build_dependency_graph(spec);
    auto verdict = check_well_formed(report.graph);
    if (!verdict.ok) {
        std::string message = "specification is not efficiently monitorable";
        for (const auto& err : verdict.errors) message += "\n  " + err.message;
        throw SpecError(ErrorKind::WellFormedness, {}, message);
    }
    report.shift = compute_shifts(report.graph);
    report.sync_edges = synchronize_edges(report.graph, report.shift);
    auto layers = compute_layers(report.graph, report.sync_edges);
    report.layer = std::move(layers.layer);
    report.total_order = std::move(layers.total_order);
    report.memory = compute_memory(report.graph, report.sync_edges);
    auto lengths = compute_phase_lengths(report.shift, report.memory.memreq);
    report.preflen = lengths.preflen;
    report.postlen = lengths.postlen;
    report.lints = lint(spec, report.graph);
    return report;
}

std::string report_to_text(const AnalysisReport& report) {
    std::ostringstream out;
    const StreamTable& table = report.graph.streams;
    char line[256];

    out << "streams:\n";
    std::snprintf(line, sizeof line, "  %-16s %-8s %-6s %6s %6s %7s %6s %15s\n", "name", "kind",
                  "type", "shift", "layer", "memreq", "slots", "memreq(formula)");
    out << line;
    for (std::size_t id = 0; id < table.size(); ++id) {
        const StreamInfo& info = table[static_cast<int>(id)];
        std::snprintf(line, sizeof line, "  %-16s %-8s %-6s %6d %6d %7d %6d %15d\n",
                      info.name.c_str(), stream_kind_name(info.kind), type_name(info.type),
                      report.shift[id], report.layer[id], report.memory.memreq[id],
                      report.memory.slots[id], report.memory.memreq_formula[id]);
        out << line;
    }

    out << "edges:\n";
    for (const SyncEdge& s : report.sync_edges) {
        const AccessEdge& e = report.graph.edges[s.edge_index];
        std::snprintf(line, sizeof line, "  %s -[%+d]-> %s  (sync distance %d)\n",
                      table[e.accessor].name.c_str(), e.offset, table[e.accessed].name.c_str(),
                      s.distance);
        out << line;
    }

    out << "evaluation order: ";
    int current_layer = 0;
    bool first_in_layer = true;
    for (int node : report.total_order) {
        if (report.layer[node] != current_layer) {
            if (current_layer != 0) out << " | ";
            current_layer = report.layer[node];
            first_in_layer = true;
        }
        if (!first_in_layer) out << ", ";
        out << table[node].name;
        first_in_layer = false;
    }
    out << "\n";

    out << "preflen=" << report.preflen << " postlen=" << report.postlen
        << " memcon=" << report.memory.memcon_bytes << " bytes\n";

    if (!report.lints.empty()) {
        out << "lints:\n";
        for (const Lint& l : report.lints)
            out << "  " << l.kind << " (line " << l.span.line << "): " << l.message << "\n";
    }
    return out.str();
}

nlohmann::json report_to_json(const AnalysisReport& report) {
    const StreamTable& table = report.graph.streams;
    nlohmann::json streams = nlohmann::json::array();
    for (std::size_t id = 0; id < table.size(); ++id) {
        const StreamInfo& info = table[static_cast<int>(id)];
        streams.push_back({{"name", info.name},
                           {"kind", stream_kind_name(info.kind)},
                           {"type", type_name(info.type)},
                           {"shift", report.shift[id]},
                           {"layer", report.layer[id]},
                           {"memreq", report.memory.memreq[id]},
                           {"slots", report.memory.slots[id]}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const SyncEdge& s : report.sync_edges) {
        const AccessEdge& e = report.graph.edges[s.edge_index];
        edges.push_back({{"from", table[e.accessor].name},
                         {"offset", e.offset},
                         {"to", table[e.accessed].name},
                         {"sync_distance", s.distance}});
    }
    nlohmann::json lints = nlohmann::json::array();
    for (const Lint& l : report.lints)
        lints.push_back({{"kind", l.kind},
                         {"line", l.span.line},
                         {"col", l.span.col},
                         {"message", l.message}});
    return {{"streams", streams}, {"edges", edges},      {"preflen", report.preflen},
            {"postlen", report.postlen}, {"memcon_bytes", report.memory.memcon_bytes},
            {"lints", lints}};
}

} // namespace lola
