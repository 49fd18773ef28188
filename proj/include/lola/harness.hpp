#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lola/codegen.hpp"
#include "lola/trace.hpp"
#include "lola/types.hpp"

namespace lola {

/// The default toolchain invocation; {src} and {out} are substituted. The
/// LOLAC_TOOLCHAIN environment variable overrides the template.
extern const char* const kDefaultToolchain;

struct CompileResult {
    bool ok = false;
    std::string command;  // the substituted command line
    std::string output;   // combined compiler stdout+stderr
};

/// Compile an emitted monitor source file into an executable.
CompileResult compile_monitor(const std::string& src_path, const std::string& bin_path);

/// Deterministic random trace: xorshift64* draws, position-major, inputs in
/// declaration order; Int32 uniform in [lo, hi], Bool from the low bit.
Trace generate_random_trace(const TypedSpec& spec, std::size_t length, std::uint64_t seed,
                            std::int32_t int_lo, std::int32_t int_hi);

struct DifftestOptions {
    int num_traces = 100;
    std::uint64_t seed = 1;
    std::size_t max_len = 64;
    std::int32_t int_lo = -1000;
    std::int32_t int_hi = 1000;
    CodegenOptions codegen;       // io_mode must be CsvStdin; emit_streams is forced on
    std::string work_dir;         // empty: create a fresh temp dir
    int max_reported = 8;         // cap on detailed mismatch reports
};

struct DifftestReport {
    bool ok = false;
    bool build_failed = false;
    std::string build_log;
    int traces_run = 0;
    int mismatch_count = 0;
    std::vector<std::string> mismatches; // human-readable, capped
    std::string work_dir;
};

/// Compile the spec's monitor once, then compare monitor and reference
/// interpreter on `num_traces` random traces: exit codes, the trigger firings
/// (sorted by position, trigger index, message), the --streams-out file
/// (byte-exact), and on faulting runs the faulting stream and position.
DifftestReport run_difftest(const TypedSpec& spec, const DifftestOptions& options);

struct BenchOptions {
    std::int64_t events = 1000000; // trace length (number of positions)
    std::uint64_t seed = 1;
    int reps = 10;
    std::int32_t int_lo = -1000;
    std::int32_t int_hi = 1000;
    std::string work_dir; // empty: create a fresh temp dir
};

struct BenchReport {
    bool ok = false;
    std::string error;
    std::int64_t events = 0;
    std::vector<std::int64_t> monitor_ns; // per rep
    std::vector<std::int64_t> interp_ns;  // per rep
    std::int64_t monitor_ns_median = 0;
    std::int64_t interp_ns_median = 0;
    double speedup = 0.0; // interp_median / monitor_median
    std::uint64_t checksum = 0;
    bool checksum_match = false;
    std::string work_dir;
};

/// Generate an embedded-input monitor (same PRNG, same seed), compile it, and
/// time both the monitor and the reference interpreter on the identical input
/// sequence. The per-cell checksums must agree.
BenchReport run_bench(const TypedSpec& spec, const BenchOptions& options);

} // namespace lola
