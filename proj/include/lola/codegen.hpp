#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lola/analysis.hpp"
#include "lola/types.hpp"

namespace lola {

struct CodegenOptions {
    /// Evaluate each layer's streams in concurrently spawned threads (joined
    /// before the layer's commit) inside the monitor loop.
    bool parallel = false;
    /// Interleave verification annotations (`//@ ...`) and maintain ghost
    /// memory at runtime.
    bool annotations = false;
    /// Stage all computed stream values and support `--streams-out <path>`.
    bool emit_streams = false;

    enum class IoMode {
        CsvStdin,          // read the trace as CSV from stdin
        EmbeddedFunctions, // generate inputs internally (bench mode)
    };
    IoMode io_mode = IoMode::CsvStdin;

    // EmbeddedFunctions parameters (baked into the generated source).
    std::uint64_t embedded_seed = 1;
    std::int64_t embedded_events = 0;
    std::int32_t embedded_int_lo = -1000;
    std::int32_t embedded_int_hi = 1000;
};

/// Per-access-occurrence evaluation plan. Entry i describes edge i of the
/// dependency graph (one edge per syntactic access occurrence).
struct AccessPlan {
    std::size_t edge_index;
    int accessor;            // node ids into the stream table
    int accessed;
    int offset;
    int sync_distance;       // d = shift(accessor) - offset - shift(accessed)
    bool committed;          // accessed value already committed this round
    int buffer_index;        // d if committed, d - 1 otherwise
    std::vector<bool> prefix_reads;  // [t in 0..preflen-1]: read buffer (vs default)
    std::vector<bool> postfix_reads; // [j in 1..postlen] at index j-1
};

std::vector<AccessPlan> plan_accesses(const TypedSpec& spec, const AnalysisReport& report);

/// One block of verification annotations and the anchor it attaches to.
struct AnnotationBlock {
    std::string anchor; // e.g. "ghost", "getter:altitude", "eval:loop:tooLow",
                        // "loop-entry", "assert:loop:tooLow"
    std::vector<std::string> lines; // each starts with "//@"
};

std::vector<AnnotationBlock> emit_annotations(const TypedSpec& spec,
                                              const AnalysisReport& report);

struct EmittedProgram {
    std::string source;
    int preflen = 0;
    int postlen = 0;
    std::vector<std::pair<std::string, int>> slots; // computed + input buffer sizes
    std::vector<std::vector<std::string>> layers;   // stream names per layer (1-based)
    int annotation_blocks = 0;
    bool parallel = false;
};

/// Generate a self-contained single-file C++ monitor program.
EmittedProgram generate(const TypedSpec& spec, const AnalysisReport& report,
                        const CodegenOptions& options);

/// Human-readable one-paragraph summary of an emitted monitor's structure.
std::string render_report(const EmittedProgram& program);

} // namespace lola
