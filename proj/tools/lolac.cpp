// lolac: command-line driver for the Lola monitoring toolchain.
//
// Exit codes: 0 success, 1 specification/trace/usage errors, 2 runtime
// faults, 3 internal errors (toolchain failures, difftest mismatches).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lola/analysis.hpp"
#include "lola/codegen.hpp"
#include "lola/diag.hpp"
#include "lola/harness.hpp"
#include "lola/interpreter.hpp"
#include "lola/parser.hpp"
#include "lola/process.hpp"
#include "lola/trace.hpp"
#include "lola/types.hpp"

namespace {

int spec_error_exit(const lola::SpecError& e) {
    return e.kind() == lola::ErrorKind::Internal ? 3 : 1;
}

std::string load_text(const std::string& path) {
    try {
        return lola::read_file(path);
    } catch (const lola::SpecError&) {
        throw lola::SpecError(lola::ErrorKind::Trace, lola::Span{0, 0},
                              "cannot open '" + path + "'");
    }
}

lola::TypedSpec load_spec(const std::string& path) {
    std::string text = load_text(path);
    lola::RawSpec raw = lola::parse(text);
    return lola::resolve_and_typecheck(raw);
}

void print_fault(const lola::Fault& fault) {
    std::fprintf(stderr, "runtime error: division by zero in %s at position %lld\n",
                 fault.stream.c_str(), static_cast<long long>(fault.position));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lolac: compiler and reference toolchain for Lola stream specifications"};
    app.require_subcommand(1);

    // analyze
    auto* cmd_analyze = app.add_subcommand("analyze", "dependency analysis report");
    std::string analyze_spec;
    bool analyze_json = false;
    cmd_analyze->add_option("spec", analyze_spec, "specification file")->required();
    cmd_analyze->add_flag("--json", analyze_json, "machine-readable JSON output");

    // check
    auto* cmd_check = app.add_subcommand("check", "well-formedness verdict");
    std::string check_spec;
    cmd_check->add_option("spec", check_spec, "specification file")->required();

    // compile
    auto* cmd_compile = app.add_subcommand("compile", "emit a C++ monitor");
    std::string compile_spec, compile_out;
    bool compile_parallel = false, compile_annotations = false, compile_streams = false;
    std::string compile_io = "csv_stdin";
    std::uint64_t compile_seed = 1;
    std::int64_t compile_events = 1000000;
    cmd_compile->add_option("spec", compile_spec, "specification file")->required();
    cmd_compile->add_option("-o,--output", compile_out, "output C++ file")->required();
    cmd_compile->add_flag("--parallel", compile_parallel, "layer-parallel evaluation");
    cmd_compile->add_flag("--annotations", compile_annotations,
                          "interleave verification annotations and ghost memory");
    cmd_compile->add_flag("--emit-streams", compile_streams,
                          "support --streams-out in the monitor");
    cmd_compile->add_option("--io-mode", compile_io, "csv_stdin | embedded_functions")
        ->check(CLI::IsMember({"csv_stdin", "embedded_functions"}));
    cmd_compile->add_option("--embedded-seed", compile_seed, "PRNG seed (embedded io)");
    cmd_compile->add_option("--embedded-events", compile_events, "trace length (embedded io)");

    // interpret
    auto* cmd_interpret = app.add_subcommand("interpret", "run the reference interpreter");
    std::string interpret_spec, interpret_trace, interpret_streams_out;
    cmd_interpret->add_option("spec", interpret_spec, "specification file")->required();
    cmd_interpret->add_option("trace", interpret_trace, "trace CSV file")->required();
    cmd_interpret->add_option("--streams-out", interpret_streams_out,
                              "write all computed stream values as CSV");

    // difftest
    auto* cmd_difftest = app.add_subcommand("difftest", "compare monitor against interpreter");
    std::string difftest_spec;
    int difftest_random = 100;
    std::uint64_t difftest_seed = 1;
    std::size_t difftest_max_len = 64;
    bool difftest_parallel = false, difftest_annotations = false;
    cmd_difftest->add_option("spec", difftest_spec, "specification file")->required();
    cmd_difftest->add_option("--random", difftest_random, "number of random traces")
        ->required();
    cmd_difftest->add_option("--seed", difftest_seed, "PRNG seed");
    cmd_difftest->add_option("--max-len", difftest_max_len, "maximum trace length");
    cmd_difftest->add_flag("--parallel", difftest_parallel, "test the parallel monitor");
    cmd_difftest->add_flag("--annotations", difftest_annotations,
                           "test the annotated monitor");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "compare monitor and interpreter speed");
    std::string bench_spec;
    std::int64_t bench_events = 1000000;
    std::uint64_t bench_seed = 1;
    int bench_reps = 10;
    cmd_bench->add_option("spec", bench_spec, "specification file")->required();
    cmd_bench->add_option("--events", bench_events, "trace length");
    cmd_bench->add_option("--seed", bench_seed, "PRNG seed");
    cmd_bench->add_option("--reps", bench_reps, "repetitions (median is reported)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*cmd_analyze) {
            lola::TypedSpec spec = load_spec(analyze_spec);
            lola::AnalysisReport report = lola::analyze(spec);
            if (analyze_json) {
                std::cout << lola::report_to_json(report).dump(2) << "\n";
            } else {
                std::cout << lola::report_to_text(report);
            }
            return 0;
        }

        if (*cmd_check) {
            lola::TypedSpec spec = load_spec(check_spec);
            lola::DependencyGraph graph = lola::build_dependency_graph(spec);
            lola::WellFormednessVerdict verdict = lola::check_well_formed(graph);
            if (verdict.ok) {
                for (const lola::Lint& lint : lola::analyze(spec).lints) {
                    std::cerr << check_spec << ":" << lint.span.line << ":" << lint.span.col
                              << ": warning: " << lint.message << " [" << lint.kind << "]\n";
                }
                std::cout << "ok: efficiently monitorable\n";
                return 0;
            }
            for (const lola::CycleError& err : verdict.errors) {
                lola::Span span{0, 0};
                if (!err.edge_indices.empty()) {
                    span = graph.edges[err.edge_indices.front()].span;
                }
                std::cerr << lola::format_diagnostic(check_spec, span,
                                                     "not efficiently monitorable: " +
                                                         err.message)
                          << "\n";
            }
            return 1;
        }

        if (*cmd_compile) {
            lola::TypedSpec spec = load_spec(compile_spec);
            lola::AnalysisReport report = lola::analyze(spec);
            lola::CodegenOptions options;
            options.parallel = compile_parallel;
            options.annotations = compile_annotations;
            options.emit_streams = compile_streams;
            options.io_mode = compile_io == "embedded_functions"
                                  ? lola::CodegenOptions::IoMode::EmbeddedFunctions
                                  : lola::CodegenOptions::IoMode::CsvStdin;
            options.embedded_seed = compile_seed;
            options.embedded_events = compile_events;
            lola::EmittedProgram program = lola::generate(spec, report, options);
            lola::write_file(compile_out, program.source);
            std::cout << lola::render_report(program) << "\n";
            return 0;
        }

        if (*cmd_interpret) {
            lola::TypedSpec spec = load_spec(interpret_spec);
            lola::Trace trace = lola::load_trace_csv(load_text(interpret_trace), spec);
            lola::EvaluationModel model = lola::evaluate(spec, trace);
            for (const lola::Firing& f : lola::reported_firings(model)) {
                std::printf("%lld,%d,%s\n", static_cast<long long>(f.position),
                            f.trigger_index, f.message.c_str());
            }
            if (!interpret_streams_out.empty()) {
                lola::write_file(interpret_streams_out, lola::model_to_csv(model));
            }
            if (model.fault) {
                print_fault(*model.fault);
                return 2;
            }
            return 0;
        }

        if (*cmd_difftest) {
            lola::TypedSpec spec = load_spec(difftest_spec);
            lola::DifftestOptions options;
            options.num_traces = difftest_random;
            options.seed = difftest_seed;
            options.max_len = difftest_max_len;
            options.codegen.parallel = difftest_parallel;
            options.codegen.annotations = difftest_annotations;
            lola::DifftestReport report = lola::run_difftest(spec, options);
            if (report.build_failed) {
                std::cerr << "difftest: monitor build failed\n" << report.build_log << "\n";
                return 3;
            }
            std::cout << "difftest: " << report.traces_run << " traces, "
                      << report.mismatch_count << " mismatches (work dir " << report.work_dir
                      << ")\n";
            for (const std::string& m : report.mismatches) {
                std::cout << "  " << m << "\n";
            }
            return report.ok ? 0 : 3;
        }

        if (*cmd_bench) {
            if (bench_events < 1) {
                std::cerr << "bench: --events must be at least 1\n";
                return 1;
            }
            if (bench_reps < 1) {
                std::cerr << "bench: --reps must be at least 1\n";
                return 1;
            }
            lola::TypedSpec spec = load_spec(bench_spec);
            lola::BenchOptions options;
            options.events = bench_events;
            options.seed = bench_seed;
            options.reps = bench_reps;
            lola::BenchReport report = lola::run_bench(spec, options);
            if (!report.ok) {
                std::cerr << "bench: " << report.error << "\n";
                return 3;
            }
            double per_event = static_cast<double>(report.monitor_ns_median) /
                               static_cast<double>(report.events);
            std::printf("bench: events=%lld reps=%d\n",
                        static_cast<long long>(report.events),
                        static_cast<int>(report.monitor_ns.size()));
            std::printf("monitor:     median %lld ns (%.2f ns/event)\n",
                        static_cast<long long>(report.monitor_ns_median), per_event);
            std::printf("interpreter: median %lld ns\n",
                        static_cast<long long>(report.interp_ns_median));
            std::printf("speedup:     %.2fx\n", report.speedup);
            std::printf("checksum:    %016llx (match)\n",
                        static_cast<unsigned long long>(report.checksum));
            return 0;
        }
    } catch (const lola::SpecError& e) {
        std::string file;
        if (*cmd_analyze) file = analyze_spec;
        if (*cmd_check) file = check_spec;
        if (*cmd_compile) file = compile_spec;
        if (*cmd_interpret) file = interpret_spec;
        if (*cmd_difftest) file = difftest_spec;
        if (*cmd_bench) file = bench_spec;
        if (e.kind() == lola::ErrorKind::Trace && *cmd_interpret && e.span().line > 0) {
            // trace CSV errors point into the trace file, not the spec
            file = interpret_trace;
        }
        std::cerr << lola::format_diagnostic(file, e.span(), e.what()) << "\n";
        return spec_error_exit(e);
    }
    return 3;
}
