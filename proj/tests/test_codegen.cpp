#include <doctest.h>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "lola/analysis.hpp"
#include "lola/codegen.hpp"

using namespace lola;
using testutil::typed;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

int count_occurrences(const std::string& haystack, const std::string& needle) {
    int n = 0;
    for (std::size_t at = haystack.find(needle); at != std::string::npos;
         at = haystack.find(needle, at + needle.size()))
        ++n;
    return n;
}

EmittedProgram emit(const TypedSpec& spec, CodegenOptions options = {}) {
    return generate(spec, analyze(spec), options);
}

const AnnotationBlock* find_block(const std::vector<AnnotationBlock>& blocks,
                                  const std::string& anchor) {
    for (const auto& b : blocks)
        if (b.anchor == anchor) return &b;
    return nullptr;
}

} // namespace

TEST_SUITE_BEGIN("codegen");

TEST_CASE("access plans satisfy the buffer-geometry invariants") {
    const char* files[] = {"specs/altitude.lola", "specs/altitude_adapted.lola",
                           "specs/network.lola", "specs/flight_phases.lola",
                           "specs/flight_phases_nodiv.lola"};
    for (const char* file : files) {
        CAPTURE(file);
        TypedSpec spec = testutil::load_spec(file);
        AnalysisReport r = analyze(spec);
        std::vector<AccessPlan> plans = plan_accesses(spec, r);
        REQUIRE(plans.size() == r.graph.edges.size());
        for (const AccessPlan& p : plans) {
            const AccessEdge& e = r.graph.edges[p.edge_index];
            CHECK(p.accessor == e.accessor);
            CHECK(p.accessed == e.accessed);
            CHECK(p.offset == e.offset);
            CHECK(p.sync_distance == r.shift[p.accessor] - p.offset - r.shift[p.accessed]);
            bool committed = r.graph.streams.is_input(p.accessed) ||
                             r.layer[p.accessed] < r.layer[p.accessor];
            CHECK(p.committed == committed);
            CHECK(p.buffer_index == p.sync_distance - (committed ? 0 : 1));
            CHECK(p.buffer_index >= 0);
            CHECK(p.buffer_index < r.memory.slots[p.accessed]);
            REQUIRE(p.prefix_reads.size() == static_cast<std::size_t>(r.preflen));
            for (int t = 0; t < r.preflen; ++t) {
                CHECK(p.prefix_reads[t] == (t - r.shift[p.accessor] + p.offset >= 0));
            }
            REQUIRE(p.postfix_reads.size() == static_cast<std::size_t>(r.postlen));
            for (int j = 1; j <= r.postlen; ++j) {
                CHECK(p.postfix_reads[j - 1] ==
                      (j <= p.sync_distance + r.shift[p.accessed]));
            }
        }
    }
}

TEST_CASE("altitude access plan: the future access reads until the input ends") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    AnalysisReport r = analyze(spec);
    int tooLow = r.graph.streams.index_of.at("tooLow");
    int altitude = r.graph.streams.index_of.at("altitude");

    std::vector<AccessPlan> plans = plan_accesses(spec, r);
    const AccessPlan* future = nullptr;
    const AccessPlan* past = nullptr;
    for (const AccessPlan& p : plans) {
        if (p.accessor == tooLow && p.accessed == altitude && p.offset == 1) future = &p;
        if (p.accessor == tooLow && p.accessed == altitude && p.offset == -1) past = &p;
    }
    REQUIRE(future != nullptr);
    REQUIRE(past != nullptr);

    CHECK(future->sync_distance == 0);
    CHECK(future->buffer_index == 0);             // the value committed this round
    CHECK(future->prefix_reads == std::vector<bool>{true, true});
    CHECK(future->postfix_reads == std::vector<bool>{false});  // input is gone

    CHECK(past->sync_distance == 2);
    CHECK(past->buffer_index == 2);
    CHECK(past->prefix_reads == std::vector<bool>{false, false});  // before the trace
    CHECK(past->postfix_reads == std::vector<bool>{true});
}

TEST_CASE("generated monitor structure: fixed-capacity memory only") {
    EmittedProgram p = emit(testutil::load_spec("specs/altitude.lola"));
    CHECK(p.preflen == 2);
    CHECK(p.postlen == 1);
    CHECK(!p.parallel);
    REQUIRE(p.layers.size() == 2);
    CHECK(p.layers[0] == std::vector<std::string>{"tooLow", "tooHigh"});
    CHECK(p.layers[1] == std::vector<std::string>{"trigger_0", "trigger_1"});

    const std::string& src = p.source;
    CHECK(contains(src, "struct Memory"));
    CHECK(contains(src, "std::array<int32_t, 3> m_altitude"));
    CHECK(contains(src, "int main("));

    // No dynamic allocation anywhere in the plain monitor.
    CHECK(!contains(src, "std::vector"));
    CHECK(!contains(src, "new "));
    CHECK(!contains(src, "malloc"));
    CHECK(!contains(src, "std::string"));

    // Strict conjunction is spelled as a helper call, not `&&`.
    CHECK(contains(src, "land("));
    CHECK(contains(src, "inline bool land(bool a, bool b)"));

    // Phase specialization: tooLow (shift 1) first evaluates in prefix round
    // 1, runs one postfix round, and has a dynamic-bounds variant for traces
    // that end inside the prefix.
    CHECK(contains(src, "eval_pre1_tooLow"));
    CHECK(!contains(src, "eval_pre0_tooLow"));
    CHECK(contains(src, "eval_loop_tooLow"));
    CHECK(contains(src, "eval_post1_tooLow"));
    CHECK(contains(src, "eval_dyn_tooLow"));
    CHECK(contains(src, "advance_altitude"));

    // Triggers print through a single reporting helper.
    CHECK(contains(src, "report_trigger"));
    CHECK(contains(src, "Flying below minimum altitude."));
}

TEST_CASE("postlen-zero monitors have no postfix machinery") {
    EmittedProgram p = emit(testutil::load_spec("specs/network.lola"));
    CHECK(p.preflen == 2);
    CHECK(p.postlen == 0);
    const std::string& src = p.source;
    CHECK(!contains(src, "eval_post"));
    CHECK(!contains(src, "eval_dyn"));
    CHECK(!contains(src, "advance_"));
    CHECK(contains(src, "eval_pre0_count"));
    CHECK(contains(src, "eval_pre1_count"));
    // Division-free spec: no fault plumbing.
    CHECK(!contains(src, "checked_div"));
    CHECK(!contains(src, "fail_fault"));
}

TEST_CASE("division plumbing appears exactly when needed") {
    TypedSpec spec = typed("input x: Int32\noutput d := 100 / x\ntrigger d > 50 \"big\"");
    EmittedProgram p = emit(spec);
    CHECK(contains(p.source, "checked_div"));
    CHECK(contains(p.source, "runtime error: division by zero in %s at position %lld"));
    CHECK(contains(p.source, "return 2;"));
}

TEST_CASE("parallel evaluation spawns one thread per stream in wide layers") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    CodegenOptions opts;
    opts.parallel = true;
    EmittedProgram p = emit(spec, opts);
    CHECK(p.parallel);
    CHECK(contains(p.source, "#include <thread>"));
    CHECK(contains(p.source, "std::thread th_tooLow"));
    CHECK(contains(p.source, "th_tooLow.join()"));
    CHECK(contains(p.source, "th_tooHigh.join()"));

    // Sequential build has none of it.
    CHECK(!contains(emit(spec).source, "std::thread"));

    // Singleton layers stay inline even in parallel mode.
    TypedSpec chain = typed("input x: Int32\noutput a := x + 1\noutput b := a * 2");
    EmittedProgram q = emit(chain, opts);
    CHECK(!contains(q.source, "std::thread th_a"));
    CHECK(!contains(q.source, "std::thread th_b"));
}

TEST_CASE("streams dumping is compiled in only on request") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    CHECK(!contains(emit(spec).source, "--streams-out"));
    CodegenOptions opts;
    opts.emit_streams = true;
    const std::string src = emit(spec, opts).source;
    CHECK(contains(src, "--streams-out"));
    CHECK(contains(src, "tooLow,tooHigh,trigger_0,trigger_1"));
    CHECK(contains(src, "# trigger,"));
}

TEST_CASE("embedded-functions io replaces the CSV reader") {
    TypedSpec spec = testutil::load_spec("specs/altitude_adapted.lola");
    CodegenOptions opts;
    opts.io_mode = CodegenOptions::IoMode::EmbeddedFunctions;
    opts.embedded_seed = 42;
    opts.embedded_events = 1000;
    const std::string src = emit(spec, opts).source;
    CHECK(contains(src, "# bench events="));
    CHECK(contains(src, "42"));
    CHECK(contains(src, "1000"));
    CHECK(contains(src, "2685821657736338717"));  // the pinned PRNG multiplier
    CHECK(!contains(src, "std::fgets"));
    CHECK(!contains(src, "report_trigger"));      // firings are suppressed
    CHECK(contains(src, "0x9E3779B97F4A7C15"));
    CHECK(contains(src, "0xC2B2AE3D27D4EB4F"));   // checksum mixing constants
}

TEST_CASE("trigger messages are escaped into the generated source") {
    TypedSpec spec = typed("input x: Int32\ntrigger x > 0 \"say \\\"hi\\\" \\\\ 100%\"");
    CHECK(spec.triggers[0].message == "say \"hi\" \\ 100%");
    const std::string src = emit(spec).source;
    CHECK(contains(src, "say \\\"hi\\\" \\\\ 100%"));
}

TEST_CASE("generation is deterministic") {
    TypedSpec spec = testutil::load_spec("specs/network.lola");
    CodegenOptions opts;
    opts.annotations = true;
    opts.emit_streams = true;
    CHECK(emit(spec, opts).source == emit(spec, opts).source);
}

TEST_CASE("render_report summarizes the monitor") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    std::string text = render_report(emit(spec));
    CHECK(contains(text, "prefix=2 loop postfix=1"));
    CHECK(contains(text, "altitude×3"));
    CHECK(contains(text, "[tooLow, tooHigh] [trigger_0, trigger_1]"));
    CHECK(contains(text, "parallel=off"));

    CodegenOptions opts;
    opts.parallel = true;
    opts.annotations = true;
    std::string annotated = render_report(emit(spec, opts));
    CHECK(contains(annotated, "parallel=on"));
    CHECK(contains(annotated, "annotation blocks="));
}

TEST_CASE("annotation blocks: getters, loop entry, inline asserts") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    AnalysisReport r = analyze(spec);
    std::vector<AnnotationBlock> blocks = emit_annotations(spec, r);

    const AnnotationBlock* ghost = find_block(blocks, "ghost");
    REQUIRE(ghost != nullptr);
    CHECK(ghost->lines.size() == 3);

    const AnnotationBlock* getter = find_block(blocks, "getter:altitude");
    REQUIRE(getter != nullptr);
    REQUIRE(getter->lines.size() == 5);  // pure, requires, one ensures per slot
    CHECK(getter->lines[0] == "//@ pure");
    CHECK(getter->lines[1] == "//@ requires index < 3");
    CHECK(getter->lines[2] == "//@ ensures index == 0 ==> result == self.altitude[0]");

    const AnnotationBlock* entry = find_block(blocks, "loop-entry");
    REQUIRE(entry != nullptr);
    auto has_line = [&](const std::string& want) {
        for (const auto& l : entry->lines)
            if (l == want) return true;
        return false;
    };
    CHECK(has_line("//@ assert iter == 2"));
    CHECK(has_line("//@ assert gm.altitude.len() == 2"));
    CHECK(has_line("//@ assert gm.tooLow.len() == 1"));
    CHECK(has_line("//@ invariant iter >= 1 ==> mem.altitude[0] == gm.altitude[iter - 1]"));
    CHECK(has_line("//@ invariant iter >= 2 ==> mem.altitude[1] == gm.altitude[iter - 2]"));
    CHECK(has_line("//@ invariant iter >= 3 ==> mem.altitude[2] == gm.altitude[iter - 3]"));

    // One eval marker and one inline assert per emitted variant of tooLow.
    for (const char* anchor : {"eval:pre1:tooLow", "eval:loop:tooLow", "eval:post1:tooLow",
                               "eval:dyn:tooLow", "assert:pre1:tooLow", "assert:loop:tooLow",
                               "assert:post1:tooLow"}) {
        CAPTURE(anchor);
        CHECK(find_block(blocks, anchor) != nullptr);
    }
    // The dynamic epilogue carries no inline asserts.
    CHECK(find_block(blocks, "assert:dyn:tooLow") == nullptr);
}

TEST_CASE("annotated source interleaves every block and maintains ghost memory") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    AnalysisReport r = analyze(spec);
    CodegenOptions opts;
    opts.annotations = true;
    EmittedProgram p = generate(spec, r, opts);

    CHECK(p.annotation_blocks == static_cast<int>(emit_annotations(spec, r).size()));
    CHECK(contains(p.source, "struct GhostMemory"));
    CHECK(contains(p.source, "std::vector<int32_t> altitude;"));
    CHECK(contains(p.source, "gm.altitude.push_back(v);"));
    CHECK(contains(p.source, "//@ pure"));
    CHECK(contains(p.source, "//@ assert v_tooLow =="));
    CHECK(contains(p.source, "//@ invariant iter >= 1 ==> mem.altitude[0]"));

    // Ghost expressions index absolute positions: in the loop, tooLow sits at
    // position iter - 1, so altitude[-1] is gm.altitude[iter - 2] and
    // altitude[1] is gm.altitude[iter].
    CHECK(contains(p.source, "gm.altitude[iter - 2]"));
    CHECK(contains(p.source, "gm.altitude[iter]"));

    // Without annotations there is no trace of the machinery.
    EmittedProgram plain = emit(spec);
    CHECK(plain.annotation_blocks == 0);
    CHECK(!contains(plain.source, "//@"));
    CHECK(!contains(plain.source, "GhostMemory"));
}

TEST_CASE("annotated altitude monitor matches the frozen golden listing") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    CodegenOptions opts;
    opts.annotations = true;
    EmittedProgram p = emit(spec, opts);

    std::string actual;
    std::size_t start = 0;
    while (start <= p.source.size()) {
        std::size_t end = p.source.find('\n', start);
        if (end == std::string::npos) end = p.source.size();
        std::string line = p.source.substr(start, end - start);
        std::size_t at = line.find("//@");
        if (at != std::string::npos) {
            actual += line.substr(at);
            actual += '\n';
        }
        start = end + 1;
    }
    std::string expected = lola::read_file(testutil::repo_path(
        "tests/golden/altitude_annotations.golden"));
    CHECK(actual == expected);
}

TEST_CASE("empty and degenerate specifications still generate") {
    EmittedProgram empty = emit(typed(""));
    CHECK(contains(empty.source, "int main("));
    CHECK(render_report(empty) == "no streams; trivial monitor");

    // Inputs only: the monitor validates and consumes the trace.
    EmittedProgram inputs_only = emit(typed("input x: Int32"));
    CHECK(contains(inputs_only.source, "int main("));
    CHECK(render_report(inputs_only) == std::string("prefix=0 loop postfix=0; memory: x") +
                                            "×" + "1; layers:; parallel=off");
}

TEST_CASE("the monitor loop commits inputs before lower layers read them") {
    // In-loop reads of a committed input at distance d use buffer index d;
    // uncommitted same-layer values use d-1. The source encodes this in the
    // get_ calls of the loop eval functions.
    TypedSpec spec = typed("input x: Int32\noutput s := x + x[-1,0]\noutput t := s - s[-1,0]");
    EmittedProgram p = emit(spec);
    // s reads x (d=0, committed) at index 0 and x[-1] (d=1) at index 1.
    CHECK(contains(p.source, "mem.get_x(0)"));
    CHECK(contains(p.source, "mem.get_x(1)"));
    // t reads s (same round, committed before t's layer) at index 0 and
    // s[-1] at index 1.
    CHECK(contains(p.source, "mem.get_s(0)"));
    CHECK(contains(p.source, "mem.get_s(1)"));
    CHECK(count_occurrences(p.source, "(void)") >= 1);
}

TEST_SUITE_END();
