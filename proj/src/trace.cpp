#include "lola/trace.hpp"

#include <charconv>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "lola/diag.hpp"

namespace lola {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        if (start == text.size()) {
            break; // no trailing empty line after a final newline
        }
        std::size_t nl = text.find('\n', start);
        std::string_view line;
        if (nl == std::string_view::npos) {
            line = text.substr(start);
            start = text.size();
        } else {
            line = text.substr(start, nl - start);
            start = nl + 1;
        }
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_cells(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        std::string_view cell = comma == std::string_view::npos
                                    ? line.substr(start)
                                    : line.substr(start, comma - start);
        // Trim surrounding spaces/tabs.
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& message) {
    throw SpecError(ErrorKind::Trace, Span{static_cast<int>(line), static_cast<int>(column)},
                    message);
}

std::int32_t parse_cell(const std::string& cell, TypeTag type, const std::string& col_name,
                        std::size_t line_no, std::size_t col_no) {
    if (type == TypeTag::Bool) {
        if (cell == "true" || cell == "1") return 1;
        if (cell == "false" || cell == "0") return 0;
        fail(line_no, col_no,
             "malformed Bool cell '" + cell + "' in column '" + col_name +
                 "' (expected true/false/1/0)");
    }
    std::int64_t value = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || cell.empty()) {
        fail(line_no, col_no, "malformed Int32 cell '" + cell + "' in column '" + col_name + "'");
    }
    if (value < std::numeric_limits<std::int32_t>::min() ||
        value > std::numeric_limits<std::int32_t>::max()) {
        fail(line_no, col_no,
             "Int32 cell '" + cell + "' in column '" + col_name + "' is out of range");
    }
    return static_cast<std::int32_t>(value);
}

} // namespace

Trace load_trace_csv(std::string_view text, const TypedSpec& spec) {
    Trace trace;
    for (const auto& input : spec.inputs) {
        trace.input_names.push_back(input.name);
        trace.input_types.push_back(input.type);
    }
    trace.columns.assign(spec.inputs.size(), {});

    std::vector<std::string_view> lines = split_lines(text);
    if (lines.empty()) {
        return trace; // length-0 trace
    }

    // Header: every input exactly once, any order. A zero-input spec has an
    // empty header line.
    std::vector<std::string> header = split_cells(lines[0]);
    if (spec.inputs.empty()) {
        if (!(header.size() == 1 && header[0].empty())) {
            fail(1, 1, "expected an empty header row for a spec with no inputs");
        }
    } else {
        if (header.size() != spec.inputs.size()) {
            fail(1, 1,
                 "header names " + std::to_string(header.size()) + " columns but the spec has " +
                     std::to_string(spec.inputs.size()) + " inputs");
        }
    }
    // column j of the CSV feeds input slot csv_to_input[j]
    std::vector<std::size_t> csv_to_input(header.size(), SIZE_MAX);
    if (!spec.inputs.empty()) {
        std::unordered_map<std::string, std::size_t> slot_of;
        for (std::size_t i = 0; i < trace.input_names.size(); ++i) {
            slot_of.emplace(trace.input_names[i], i);
        }
        std::vector<bool> seen(spec.inputs.size(), false);
        for (std::size_t j = 0; j < header.size(); ++j) {
            auto it = slot_of.find(header[j]);
            if (it == slot_of.end()) {
                fail(1, j + 1, "unknown input column '" + header[j] + "'");
            }
            if (seen[it->second]) {
                fail(1, j + 1, "duplicate input column '" + header[j] + "'");
            }
            seen[it->second] = true;
            csv_to_input[j] = it->second;
        }
    }

    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::vector<std::string> cells = split_cells(lines[r]);
        if (!spec.inputs.empty() && cells.size() == 1 && cells[0].empty()) {
            break; // blank data line ends the trace, matching the monitor protocol
        }
        if (spec.inputs.empty()) {
            if (!(cells.size() == 1 && cells[0].empty())) {
                fail(r + 1, 1, "expected an empty row for a spec with no inputs");
            }
            ++trace.len;
            continue;
        }
        if (cells.size() != spec.inputs.size()) {
            fail(r + 1, 1,
                 "row has " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(spec.inputs.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            std::size_t slot = csv_to_input[j];
            std::int32_t v =
                parse_cell(cells[j], trace.input_types[slot], trace.input_names[slot], r + 1, j + 1);
            trace.columns[slot].push_back(v);
        }
        ++trace.len;
    }
    return trace;
}

std::string trace_to_csv(const Trace& trace) {
    std::ostringstream out;
    for (std::size_t i = 0; i < trace.input_names.size(); ++i) {
        if (i) out << ',';
        out << trace.input_names[i];
    }
    out << '\n';
    for (std::size_t p = 0; p < trace.len; ++p) {
        for (std::size_t i = 0; i < trace.columns.size(); ++i) {
            if (i) out << ',';
            if (trace.input_types[i] == TypeTag::Bool) {
                out << (trace.columns[i][p] ? "true" : "false");
            } else {
                out << trace.columns[i][p];
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace lola
