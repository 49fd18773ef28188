#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lola/types.hpp"

namespace lola {

/// One edge per syntactic access occurrence (multigraph).
struct AccessEdge {
    int accessor = 0;          // node id of the accessing stream
    std::int32_t offset = 0;   // literal offset w
    int accessed = 0;          // node id of the accessed stream
    Span span;                 // position of the access in the source
};

struct DependencyGraph {
    StreamTable streams;  // node ids index into streams
    std::vector<AccessEdge> edges;
};

struct SyncEdge {
    int accessor = 0;
    int distance = 0;  // d = shift(accessor) - w - shift(accessed), always >= 0
    int accessed = 0;
    std::size_t edge_index = 0;  // originating AccessEdge
};

struct CycleError {
    enum class Kind { PositiveCycle, ZeroSyncCycle };
    Kind kind = Kind::PositiveCycle;
    std::vector<int> nodes;               // cycle nodes in order (first != last)
    std::vector<std::size_t> edge_indices;  // edges along the cycle
    std::string message;                  // rendered witness
};

struct WellFormednessVerdict {
    bool ok = true;
    std::vector<CycleError> errors;
};

struct MemoryPlan {
    std::vector<int> memreq;        // max sync distance INTO the node
    std::vector<int> slots;         // memreq + 1
    std::vector<int> memreq_formula;  // the literal formula's value (outgoing max); report-only
    std::size_t memcon_bytes = 0;
};

struct Lint {
    std::string kind;  // "possible-division-by-zero" | "unused-stream"
    Span span;
    std::string message;
};

struct AnalysisReport {
    DependencyGraph graph;
    std::vector<int> shift;        // per node
    std::vector<SyncEdge> sync_edges;
    std::vector<int> layer;        // per node; 0 for inputs
    std::vector<int> total_order;  // computed node ids by (layer, declaration)
    MemoryPlan memory;
    int preflen = 0;
    int postlen = 0;
    std::vector<Lint> lints;
};

DependencyGraph build_dependency_graph(const TypedSpec& spec);

/// Never throws; reports positive-weight cycles and (when shifts exist)
/// zero-sync-distance cycles with witness paths.
WellFormednessVerdict check_well_formed(const DependencyGraph& graph);

/// Requires no positive cycles (throws SpecError{Internal} otherwise).
std::vector<int> compute_shifts(const DependencyGraph& graph);

std::vector<SyncEdge> synchronize_edges(const DependencyGraph& graph,
                                        const std::vector<int>& shifts);

struct LayerResult {
    std::vector<int> layer;
    std::vector<int> total_order;
};
/// Requires the zero-distance edges to form a DAG (throws SpecError{Internal}
/// otherwise).
LayerResult compute_layers(const DependencyGraph& graph, const std::vector<SyncEdge>& sync);

MemoryPlan compute_memory(const DependencyGraph& graph, const std::vector<SyncEdge>& sync);

struct PhaseLengths {
    int preflen = 0;
    int postlen = 0;
};
PhaseLengths compute_phase_lengths(const std::vector<int>& shifts,
                                   const std::vector<int>& memreq);

std::vector<Lint> lint(const TypedSpec& spec, const DependencyGraph& graph);

/// Full pipeline; throws SpecError{WellFormedness} with the rendered witness
/// when the spec is not efficiently monitorable.
AnalysisReport analyze(const TypedSpec& spec);

std::string report_to_text(const AnalysisReport& report);
nlohmann::json report_to_json(const AnalysisReport& report);

} // namespace lola
