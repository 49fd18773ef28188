#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lola/analysis.hpp"
#include "lola/trace.hpp"
#include "lola/types.hpp"

namespace lola {

struct Firing {
    std::int64_t position;
    int trigger_index;
    std::string message;

    friend bool operator==(const Firing&, const Firing&) = default;
};

struct Fault {
    std::string stream;     // faulting stream (or trigger pseudo-stream) name
    std::int64_t position;  // stream position at which the division faulted
    std::int64_t round;     // schedule round = position + shift(stream)
    int layer;              // schedule layer of the stream
};

/// The evaluation model: one value column per computed node (outputs and
/// trigger pseudo-streams, declaration order). When a run faults, cells at or
/// after the fault's schedule point are undefined.
struct EvaluationModel {
    std::vector<std::string> node_names;
    std::vector<TypeTag> node_types;
    std::vector<int> trigger_indices; // -1 for outputs
    std::vector<std::string> trigger_messages;
    std::vector<int> node_shifts;
    std::vector<int> node_layers;
    std::size_t length = 0;                              // trace length N+1
    std::vector<std::vector<std::int32_t>> values;       // [node][position]
    std::vector<std::vector<std::uint8_t>> defined;      // [node][position]
    std::vector<Firing> firings;                         // all defined firings, (pos, index) order
    std::optional<Fault> fault;
    std::int64_t dump_rows = 0; // rows a monitor emits before aborting (= length if clean)
};

/// Partially known stream values, for direct expression evaluation.
class PartialModel {
  public:
    PartialModel(const TypedSpec& spec, std::size_t length);

    void set(const std::string& stream, std::size_t position, std::int32_t value);
    const TypedSpec& spec() const { return *spec_; }
    std::size_t length() const { return length_; }
    const std::vector<std::vector<std::int32_t>>& values() const { return values_; }
    const std::vector<std::vector<std::uint8_t>>& known() const { return known_; }

  private:
    const TypedSpec* spec_;
    std::size_t length_;
    std::vector<std::vector<std::int32_t>> values_; // computed nodes, decl order
    std::vector<std::vector<std::uint8_t>> known_;
};

enum class EvalState { Value, Pending, Fault };

struct EvalResult {
    EvalState state = EvalState::Pending;
    std::int32_t value = 0;
};

/// Evaluate one expression at position k against a partial model and a trace.
/// Out-of-bounds accesses yield the access's default; an unknown computed cell
/// yields Pending; division/modulo by zero yields Fault.
EvalResult eval_expr(const Expr& expr, std::int64_t k, const PartialModel& model,
                     const Trace& trace);

/// Fixpoint evaluation of the whole spec over a trace. The spec must be
/// well-formed. The result is independent of evaluation order.
EvaluationModel evaluate(const TypedSpec& spec, const Trace& trace);

/// Same fixpoint, but cells are attempted in a seed-shuffled order each pass.
/// Exists to demonstrate order-independence; results equal evaluate().
EvaluationModel evaluate_with_order(const TypedSpec& spec, const Trace& trace,
                                    std::uint64_t order_seed);

/// Firings a monitor reports on stdout: those strictly before the fault's
/// (round, layer) schedule point; all of them for a clean run. Sorted by
/// (position, trigger index).
std::vector<Firing> reported_firings(const EvaluationModel& model);

/// Render the model as CSV: header of node names, one row per position (Bool
/// as true/false), then `# trigger,<pos>,<index>,<message>` comment lines.
/// After a fault only the first `dump_rows` rows and the firings among them
/// appear, matching what a monitor's --streams-out file contains.
std::string model_to_csv(const EvaluationModel& model);

/// Bench checksum over every defined cell of the model (see prng.hpp).
std::uint64_t model_checksum(const EvaluationModel& model);

} // namespace lola
