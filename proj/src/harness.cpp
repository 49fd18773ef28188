#include "lola/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "lola/analysis.hpp"
#include "lola/diag.hpp"
#include "lola/interpreter.hpp"
#include "lola/process.hpp"
#include "lola/prng.hpp"

namespace lola {

const char* const kDefaultToolchain =
    "g++ -std=c++20 -O2 -Wall -Wextra -pthread -o {out} {src}";

namespace {

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = tmpl.find(key, pos)) != std::string::npos) {
        tmpl.replace(pos, key.size(), value);
        pos += value.size();
    }
    return tmpl;
}

std::int64_t median(std::vector<std::int64_t> xs) {
    std::sort(xs.begin(), xs.end());
    return xs.empty() ? 0 : xs[xs.size() / 2];
}

struct ParsedFiring {
    std::int64_t position;
    int trigger_index;
    std::string message;

    bool operator==(const ParsedFiring&) const = default;
};

/// Parse monitor stdout: one `<position>,<index>,<message>` line per firing.
/// Returns std::nullopt on malformed output.
std::optional<std::vector<ParsedFiring>> parse_firings(const std::string& out) {
    std::vector<ParsedFiring> firings;
    std::size_t start = 0;
    while (start < out.size()) {
        std::size_t nl = out.find('\n', start);
        if (nl == std::string::npos) nl = out.size();
        std::string line = out.substr(start, nl - start);
        start = nl + 1;
        if (line.empty()) continue;
        std::size_t c1 = line.find(',');
        if (c1 == std::string::npos) return std::nullopt;
        std::size_t c2 = line.find(',', c1 + 1);
        if (c2 == std::string::npos) return std::nullopt;
        try {
            ParsedFiring f;
            f.position = std::stoll(line.substr(0, c1));
            f.trigger_index = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
            f.message = line.substr(c2 + 1);
            firings.push_back(std::move(f));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return firings;
}

std::vector<ParsedFiring> normalize(std::vector<ParsedFiring> fs) {
    std::sort(fs.begin(), fs.end(), [](const ParsedFiring& a, const ParsedFiring& b) {
        return std::tie(a.position, a.trigger_index, a.message) <
               std::tie(b.position, b.trigger_index, b.message);
    });
    return fs;
}

std::string show_firings(const std::vector<ParsedFiring>& fs, std::size_t limit = 4) {
    std::ostringstream ss;
    ss << fs.size() << " firing(s)";
    for (std::size_t i = 0; i < fs.size() && i < limit; ++i) {
        ss << (i ? "; " : ": ") << fs[i].position << ',' << fs[i].trigger_index << ','
           << fs[i].message;
    }
    return ss.str();
}

std::string first_diff(const std::string& a, const std::string& b) {
    std::size_t i = 0;
    std::size_t line = 1;
    while (i < a.size() && i < b.size() && a[i] == b[i]) {
        if (a[i] == '\n') ++line;
        ++i;
    }
    std::ostringstream ss;
    ss << "first difference at byte " << i << " (line " << line << ")";
    return ss.str();
}

} // namespace

CompileResult compile_monitor(const std::string& src_path, const std::string& bin_path) {
    const char* env = std::getenv("LOLAC_TOOLCHAIN");
    std::string tmpl = env && *env ? env : kDefaultToolchain;
    std::string cmd = substitute(substitute(tmpl, "{src}", src_path), "{out}", bin_path);
    RunResult r = run_shell(cmd);
    CompileResult result;
    result.command = cmd;
    result.output = r.out + r.err;
    result.ok = r.exit_code == 0;
    return result;
}

Trace generate_random_trace(const TypedSpec& spec, std::size_t length, std::uint64_t seed,
                            std::int32_t int_lo, std::int32_t int_hi) {
    Trace trace;
    for (const auto& input : spec.inputs) {
        trace.input_names.push_back(input.name);
        trace.input_types.push_back(input.type);
    }
    trace.columns.assign(spec.inputs.size(), {});
    trace.len = length;
    XorShift64Star rng(seed);
    for (std::size_t p = 0; p < length; ++p) {
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
            std::int32_t v = trace.input_types[i] == TypeTag::Bool
                                 ? (rng.next_bool() ? 1 : 0)
                                 : rng.next_int32(int_lo, int_hi);
            trace.columns[i].push_back(v);
        }
    }
    return trace;
}

DifftestReport run_difftest(const TypedSpec& spec, const DifftestOptions& options) {
    DifftestReport report;
    report.work_dir =
        options.work_dir.empty() ? make_temp_dir("lolac-difftest-") : options.work_dir;

    AnalysisReport analysis = analyze(spec);
    CodegenOptions cg = options.codegen;
    cg.io_mode = CodegenOptions::IoMode::CsvStdin;
    cg.emit_streams = true;
    EmittedProgram program = generate(spec, analysis, cg);

    std::string src_path = report.work_dir + "/monitor.cpp";
    std::string bin_path = report.work_dir + "/monitor";
    write_file(src_path, program.source);
    CompileResult cc = compile_monitor(src_path, bin_path);
    if (!cc.ok) {
        report.build_failed = true;
        report.build_log = cc.command + "\n" + cc.output;
        return report;
    }

    XorShift64Star master(options.seed);
    int mismatches = 0;
    for (int i = 0; i < options.num_traces; ++i) {
        // The first preflen+1 traces sweep every boundary length 0..preflen.
        std::size_t length;
        std::uint64_t len_draw = master.next();
        if (i <= analysis.preflen) {
            length = static_cast<std::size_t>(i);
        } else {
            length = static_cast<std::size_t>(len_draw % (options.max_len + 1));
        }
        std::uint64_t trace_seed = master.next();
        Trace trace =
            generate_random_trace(spec, length, trace_seed, options.int_lo, options.int_hi);
        std::string csv = trace_to_csv(trace);

        EvaluationModel model = evaluate(spec, trace);
        int expected_exit = model.fault ? 2 : 0;
        std::vector<Firing> expected_firings = reported_firings(model);
        std::string expected_file = model_to_csv(model);
        std::string expected_err;
        if (model.fault) {
            expected_err = "runtime error: division by zero in " + model.fault->stream +
                           " at position " + std::to_string(model.fault->position) + "\n";
        }

        std::string streams_path =
            report.work_dir + "/streams_" + std::to_string(i) + ".csv";
        RunResult run = run_process({bin_path, "--streams-out", streams_path}, csv);

        std::vector<std::string> problems;
        if (run.exit_code != expected_exit) {
            problems.push_back("exit code " + std::to_string(run.exit_code) + ", expected " +
                               std::to_string(expected_exit) +
                               (run.err.empty() ? "" : " (stderr: " + run.err + ")"));
        }
        if (run.err != expected_err) {
            problems.push_back("stderr '" + run.err + "', expected '" + expected_err + "'");
        }
        auto monitor_firings = parse_firings(run.out);
        if (!monitor_firings) {
            problems.push_back("unparsable monitor stdout: " + run.out);
        } else {
            std::vector<ParsedFiring> expect;
            for (const Firing& f : expected_firings) {
                expect.push_back(ParsedFiring{f.position, f.trigger_index, f.message});
            }
            auto got = normalize(*monitor_firings);
            expect = normalize(std::move(expect));
            if (got != expect) {
                problems.push_back("firings differ: monitor " + show_firings(got) +
                                   " | interpreter " + show_firings(expect));
            }
        }
        std::string monitor_file;
        try {
            monitor_file = read_file(streams_path);
        } catch (const SpecError&) {
            monitor_file = "<missing streams file>";
        }
        if (monitor_file != expected_file) {
            problems.push_back("streams file differs: " +
                               first_diff(monitor_file, expected_file));
        }

        if (!problems.empty()) {
            ++mismatches;
            if (static_cast<int>(report.mismatches.size()) < options.max_reported) {
                std::ostringstream ss;
                ss << "trace " << i << " (len=" << length << ", seed=" << trace_seed << "): ";
                for (std::size_t p = 0; p < problems.size(); ++p) {
                    if (p) ss << "; ";
                    ss << problems[p];
                }
                report.mismatches.push_back(ss.str());
                write_file(report.work_dir + "/mismatch_" + std::to_string(i) + ".csv", csv);
            }
        }
        ++report.traces_run;
    }
    report.mismatch_count = mismatches;
    report.ok = mismatches == 0;
    return report;
}

BenchReport run_bench(const TypedSpec& spec, const BenchOptions& options) {
    BenchReport report;
    report.events = options.events;
    report.work_dir = options.work_dir.empty() ? make_temp_dir("lolac-bench-") : options.work_dir;

    AnalysisReport analysis = analyze(spec);
    Trace trace = generate_random_trace(spec, static_cast<std::size_t>(options.events),
                                        options.seed, options.int_lo, options.int_hi);

    // Reference interpreter timings (in-process, around evaluate()).
    std::uint64_t interp_checksum = 0;
    for (int rep = 0; rep < options.reps; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        EvaluationModel model = evaluate(spec, trace);
        auto t1 = std::chrono::steady_clock::now();
        if (model.fault) {
            report.error = "spec faults on the bench trace (position " +
                           std::to_string(model.fault->position) + " of stream " +
                           model.fault->stream + ")";
            return report;
        }
        report.interp_ns.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
        interp_checksum = model_checksum(model);
    }

    CodegenOptions cg;
    cg.io_mode = CodegenOptions::IoMode::EmbeddedFunctions;
    cg.embedded_seed = options.seed;
    cg.embedded_events = options.events;
    cg.embedded_int_lo = options.int_lo;
    cg.embedded_int_hi = options.int_hi;
    EmittedProgram program = generate(spec, analysis, cg);
    std::string src_path = report.work_dir + "/bench.cpp";
    std::string bin_path = report.work_dir + "/bench";
    write_file(src_path, program.source);
    CompileResult cc = compile_monitor(src_path, bin_path);
    if (!cc.ok) {
        report.error = "monitor build failed:\n" + cc.command + "\n" + cc.output;
        return report;
    }

    bool checksums_ok = true;
    for (int rep = 0; rep < options.reps; ++rep) {
        RunResult run = run_process({bin_path}, {});
        if (run.exit_code != 0) {
            report.error = "monitor exited with code " + std::to_string(run.exit_code) +
                           (run.err.empty() ? "" : ": " + run.err);
            return report;
        }
        long long events = 0, ns = 0;
        unsigned long long checksum = 0;
        if (std::sscanf(run.out.c_str(), "# bench events=%lld ns=%lld checksum=%llx", &events,
                        &ns, &checksum) != 3 ||
            events != options.events) {
            report.error = "unparsable bench output: " + run.out;
            return report;
        }
        report.monitor_ns.push_back(ns);
        if (checksum != interp_checksum) checksums_ok = false;
        report.checksum = checksum;
    }

    report.interp_ns_median = median(report.interp_ns);
    report.monitor_ns_median = median(report.monitor_ns);
    report.checksum_match = checksums_ok;
    if (report.monitor_ns_median > 0) {
        report.speedup = static_cast<double>(report.interp_ns_median) /
                         static_cast<double>(report.monitor_ns_median);
    }
    report.ok = checksums_ok;
    if (!checksums_ok) {
        report.error = "checksum mismatch between monitor and interpreter";
    }
    return report;
}

} // namespace lola
