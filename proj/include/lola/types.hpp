#pragma once

#include <map>
#include <string>
#include <vector>

#include "lola/ast.hpp"

namespace lola {

struct InputStream {
    std::string name;
    TypeTag type = TypeTag::Int32;
    Span span;
};

struct Constant {
    std::string name;
    TypeTag type = TypeTag::Int32;
    Literal value;
    Span span;
};

struct OutputStream {
    std::string name;
    TypeTag type = TypeTag::Int32;
    ExprPtr expr;
    int decl_pos = 0;  // 0-based position among outputs+triggers as declared
    Span span;
};

struct TriggerStream {
    int index = 0;  // 0-based among triggers
    ExprPtr expr;
    std::string message;  // explicit message, or the pretty-printed condition
    int decl_pos = 0;
    Span span;
};

enum class NameKind { Input, Constant, Output };

/// Resolved and type-checked specification. Constant references inside
/// expressions are folded to literals; every Expr node carries its type.
struct TypedSpec {
    std::vector<InputStream> inputs;
    std::vector<Constant> constants;
    std::vector<OutputStream> outputs;
    std::vector<TriggerStream> triggers;
    std::map<std::string, NameKind> names;
};

/// Throws SpecError with kind Name, Type, DefaultType, or DivisionByZeroLiteral.
TypedSpec resolve_and_typecheck(const RawSpec& raw);

// ---------------------------------------------------------------------------
// Uniform stream/node view used by analysis, interpreter, and codegen.
// ---------------------------------------------------------------------------

enum class StreamKind { Input, Output, Trigger };

const char* stream_kind_name(StreamKind k);

struct StreamInfo {
    std::string name;  // trigger pseudo-streams are named "trigger_<index>"
    StreamKind kind = StreamKind::Input;
    TypeTag type = TypeTag::Int32;
    const Expr* expr = nullptr;  // null for inputs
    int trigger_index = -1;
    std::string message;  // triggers only
    Span span;
};

/// All streams: inputs first in declaration order, then outputs and triggers
/// in declaration order. Indices into `streams` are the node ids used by the
/// analysis module.
struct StreamTable {
    std::vector<StreamInfo> streams;
    std::size_t num_inputs = 0;
    std::map<std::string, int> index_of;  // stream name -> node id

    std::size_t size() const { return streams.size(); }
    bool is_input(int id) const { return static_cast<std::size_t>(id) < num_inputs; }
    const StreamInfo& operator[](int id) const { return streams[static_cast<std::size_t>(id)]; }
};

StreamTable build_stream_table(const TypedSpec& spec);

} // namespace lola
