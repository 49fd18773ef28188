#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "lola/analysis.hpp"
#include "lola/interpreter.hpp"
#include "lola/trace.hpp"

using namespace lola;
using testutil::typed;

namespace {

std::vector<std::int32_t> column(const EvaluationModel& m, const std::string& name) {
    for (std::size_t i = 0; i < m.node_names.size(); ++i) {
        if (m.node_names[i] == name) return m.values[i];
    }
    REQUIRE(false);
    return {};
}

bool models_equal(const EvaluationModel& a, const EvaluationModel& b) {
    if (a.length != b.length || a.values != b.values || a.defined != b.defined) return false;
    if (a.firings.size() != b.firings.size()) return false;
    for (std::size_t i = 0; i < a.firings.size(); ++i) {
        if (a.firings[i].position != b.firings[i].position ||
            a.firings[i].trigger_index != b.firings[i].trigger_index ||
            a.firings[i].message != b.firings[i].message)
            return false;
    }
    if (a.fault.has_value() != b.fault.has_value()) return false;
    if (a.fault && (a.fault->stream != b.fault->stream || a.fault->position != b.fault->position))
        return false;
    return a.dump_rows == b.dump_rows;
}

} // namespace

TEST_SUITE_BEGIN("interpreter");

TEST_CASE("synchronous chain") {
    TypedSpec spec = typed("input x: Int32\noutput b := x\noutput a := b + 1");
    EvaluationModel m = evaluate(spec, load_trace_csv("x\n1\n2\n3\n", spec));
    CHECK(column(m, "b") == std::vector<std::int32_t>{1, 2, 3});
    CHECK(column(m, "a") == std::vector<std::int32_t>{2, 3, 4});
    CHECK(!m.fault);
    CHECK(m.dump_rows == 3);
}

TEST_CASE("altitude example: values, defaults at both ends, firings") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    EvaluationModel m = evaluate(spec, load_trace_csv("altitude\n100\n150\n180\n250\n", spec));
    CHECK(column(m, "tooLow") == std::vector<std::int32_t>{1, 1, 0, 0});
    CHECK(column(m, "tooHigh") == std::vector<std::int32_t>{0, 0, 0, 0});
    REQUIRE(m.firings.size() == 2);
    CHECK(m.firings[0].position == 0);
    CHECK(m.firings[0].trigger_index == 0);
    CHECK(m.firings[0].message == "Flying below minimum altitude.");
    CHECK(m.firings[1].position == 1);

    // All cells defined: totality on clean traces.
    for (const auto& col : m.defined)
        for (auto d : col) CHECK(d == 1);
}

TEST_CASE("boundary lengths work, including the empty trace") {
    TypedSpec spec = testutil::load_spec("specs/altitude.lola");
    AnalysisReport r = analyze(spec);
    for (std::size_t len = 0; len <= static_cast<std::size_t>(r.preflen) + 1; ++len) {
        CAPTURE(len);
        std::string csv = "altitude\n";
        for (std::size_t i = 0; i < len; ++i) csv += "500\n";
        EvaluationModel m = evaluate(spec, load_trace_csv(csv, spec));
        CHECK(m.length == len);
        CHECK(!m.fault);
        for (const auto& col : m.defined) {
            CHECK(col.size() == len);
            for (auto d : col) CHECK(d == 1);
        }
    }
}

TEST_CASE("zero-input specification runs on empty rows") {
    TypedSpec spec = typed("output tick := tick[-1,0] + 1\ntrigger tick > 2 \"late\"");
    EvaluationModel m = evaluate(spec, load_trace_csv("\n\n\n\n", spec));
    CHECK(column(m, "tick") == std::vector<std::int32_t>{1, 2, 3});
    REQUIRE(m.firings.size() == 1);
    CHECK(m.firings[0].position == 2);
}

TEST_CASE("trigger without a message uses the rendered condition") {
    TypedSpec spec = typed("input x: Int32\ntrigger x > 0");
    EvaluationModel m = evaluate(spec, load_trace_csv("x\n5\n", spec));
    REQUIRE(m.firings.size() == 1);
    CHECK(m.firings[0].message == "x > 0");
}

TEST_CASE("wrapping two's-complement arithmetic") {
    TypedSpec spec = typed("input x: Int32\n"
                           "output a := x / -1\n"
                           "output b := x % -1\n"
                           "output c := abs(x)\n"
                           "output d := x - 1\n"
                           "output e := x * x\n"
                           "output f := -x\n"
                           "output g := int(x > 0)");
    EvaluationModel m =
        evaluate(spec, load_trace_csv("x\n-2147483648\n65536\n7\n", spec));
    CHECK(column(m, "a") == std::vector<std::int32_t>{INT32_MIN, -65536, -7});
    CHECK(column(m, "b") == std::vector<std::int32_t>{0, 0, 0});
    CHECK(column(m, "c") == std::vector<std::int32_t>{INT32_MIN, 65536, 7});
    CHECK(column(m, "d") == std::vector<std::int32_t>{INT32_MAX, 65535, 6});
    CHECK(column(m, "e") == std::vector<std::int32_t>{0, 0, 49});
    CHECK(column(m, "f") == std::vector<std::int32_t>{INT32_MIN, -65536, -7});
    CHECK(column(m, "g") == std::vector<std::int32_t>{0, 1, 1});
    CHECK(!m.fault);
}

TEST_CASE("truncated division") {
    TypedSpec spec = typed("input x: Int32\noutput q := x / 4\noutput r := x % 4");
    EvaluationModel m = evaluate(spec, load_trace_csv("x\n-7\n7\n-8\n", spec));
    CHECK(column(m, "q") == std::vector<std::int32_t>{-1, 1, -2});
    CHECK(column(m, "r") == std::vector<std::int32_t>{-3, 3, 0});
}

TEST_CASE("division by a zero stream value faults and truncates") {
    TypedSpec spec = typed("input x: Int32\n"
                           "output d := 100 / x\n"
                           "trigger d > 50 \"big\"");
    EvaluationModel m = evaluate(spec, load_trace_csv("x\n1\n0\n2\n", spec));
    REQUIRE(m.fault.has_value());
    CHECK(m.fault->stream == "d");
    CHECK(m.fault->position == 1);
    CHECK(m.fault->round == 1);
    CHECK(m.dump_rows == 1);

    auto reported = reported_firings(m);
    REQUIRE(reported.size() == 1);
    CHECK(reported[0].position == 0);
    CHECK(reported[0].message == "big");
}

TEST_CASE("out-of-bounds default feeding a divisor faults at runtime") {
    TypedSpec spec = typed("input x: Int32\noutput y := 10 / x[1,0]");
    EvaluationModel m = evaluate(spec, load_trace_csv("x\n5\n", spec));
    REQUIRE(m.fault.has_value());
    CHECK(m.fault->stream == "y");
    CHECK(m.fault->position == 0);
    CHECK(m.fault->round == 1);  // shift(y) = 1
    CHECK(m.dump_rows == 0);     // postlen = 1
}

TEST_CASE("fault choice is schedule-minimal, not position-minimal") {
    // f faults at position 0 in round 1; g faults at position 1 in round 1.
    // Both live in the same layer; f is declared first and wins.
    TypedSpec spec = typed("input x: Int32\n"
                           "output f := 10 / x[1,0]\n"
                           "output g := 10 / x");
    EvaluationModel m = evaluate(spec, load_trace_csv("x\n5\n0\n", spec));
    REQUIRE(m.fault.has_value());
    CHECK(m.fault->stream == "f");
    CHECK(m.fault->position == 0);

    // Declaration order breaks the tie within a layer.
    TypedSpec spec2 = typed("input x: Int32\noutput a := 1 / x\noutput b := 2 / x");
    EvaluationModel m2 = evaluate(spec2, load_trace_csv("x\n0\n", spec2));
    REQUIRE(m2.fault.has_value());
    CHECK(m2.fault->stream == "a");

    // An earlier round beats an earlier position.
    EvaluationModel m3 = evaluate(spec, load_trace_csv("x\n0\n5\n5\n", spec));
    REQUIRE(m3.fault.has_value());
    CHECK(m3.fault->stream == "g");
    CHECK(m3.fault->position == 0);
}

TEST_CASE("firings in the fault's own round and layer are suppressed") {
    // The trigger shares round and layer with the faulting stream: whether it
    // is declared before or after, the monitor aborts during the layer's
    // evaluation sweep, before any of the layer's trigger reports.
    TypedSpec before = typed("input x: Int32\n"
                             "trigger x > -100 \"alive\"\n"
                             "output d := 100 / x");
    EvaluationModel m1 = evaluate(before, load_trace_csv("x\n1\n0\n", before));
    REQUIRE(m1.fault.has_value());
    auto r1 = reported_firings(m1);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].position == 0);

    TypedSpec after = typed("input x: Int32\n"
                            "output d := 100 / x\n"
                            "trigger x > -100 \"alive\"");
    EvaluationModel m2 = evaluate(after, load_trace_csv("x\n1\n0\n", after));
    auto r2 = reported_firings(m2);
    REQUIRE(r2.size() == 1);
    CHECK(r2[0].position == 0);

    // A trigger in a strictly lower layer of the same round still reports.
    TypedSpec lower = typed("input x: Int32\n"
                            "output safe := x + 0\n"
                            "trigger x > -100 \"alive\"\n"
                            "output d := 100 / safe");
    EvaluationModel m3 = evaluate(lower, load_trace_csv("x\n1\n0\n", lower));
    REQUIRE(m3.fault.has_value());
    CHECK(m3.fault->stream == "d");
    auto r3 = reported_firings(m3);
    REQUIRE(r3.size() == 2);  // positions 0 and 1: trigger layer < d's layer
    CHECK(r3[1].position == 1);
}

TEST_CASE("conditionals are lazy, conjunction and disjunction are strict") {
    TypedSpec lazy = typed("input x: Int32\noutput w := ite(x == 0, 7, 1 / x)");
    EvaluationModel m1 = evaluate(lazy, load_trace_csv("x\n0\n2\n", lazy));
    CHECK(!m1.fault);
    CHECK(column(m1, "w") == std::vector<std::int32_t>{7, 0});

    TypedSpec strict_and = typed("input x: Int32\noutput z := false & (1 / x == 1)");
    EvaluationModel m2 = evaluate(strict_and, load_trace_csv("x\n0\n", strict_and));
    REQUIRE(m2.fault.has_value());
    CHECK(m2.fault->stream == "z");

    TypedSpec strict_or = typed("input x: Int32\noutput z := true | (1 / x == 1)");
    EvaluationModel m3 = evaluate(strict_or, load_trace_csv("x\n0\n", strict_or));
    REQUIRE(m3.fault.has_value());
}

TEST_CASE("evaluation is independent of the attempt order") {
    TypedSpec specs[] = {
        testutil::load_spec("specs/altitude.lola"),
        testutil::load_spec("specs/network.lola"),
        typed("input x: Int32\noutput d := 100 / x\ntrigger d > 50 \"big\""),
    };
    std::string traces[] = {
        "altitude\n100\n700\n650\n180\n90\n640\n",
        "src,dst,fin,push,syn,length\n"
        "1,213451,false,true,true,10\n"
        "2,213451,true,false,false,20\n"
        "3,4,false,false,true,30\n"
        "1,213451,false,true,true,40\n",
        "x\n2\n1\n0\n5\n",
    };
    for (int i = 0; i < 3; ++i) {
        CAPTURE(i);
        Trace trace = load_trace_csv(traces[i], specs[i]);
        EvaluationModel reference = evaluate(specs[i], trace);
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            EvaluationModel shuffled = evaluate_with_order(specs[i], trace, seed);
            REQUIRE(models_equal(reference, shuffled));
        }
    }
}

TEST_CASE("model CSV rendering") {
    TypedSpec spec = typed("input x: Int32\n"
                           "output b := x\n"
                           "output a := b + 1\n"
                           "trigger a > 2 \"high\"");
    EvaluationModel m = evaluate(spec, load_trace_csv("x\n1\n2\n", spec));
    CHECK(model_to_csv(m) ==
          "b,a,trigger_0\n"
          "1,2,false\n"
          "2,3,true\n"
          "# trigger,1,0,high\n");

    // After a fault only dump_rows rows and the firings among them appear.
    TypedSpec faulty = typed("input x: Int32\n"
                             "output d := 100 / x\n"
                             "trigger d > 50 \"big\"");
    EvaluationModel mf = evaluate(faulty, load_trace_csv("x\n1\n0\n2\n", faulty));
    CHECK(model_to_csv(mf) ==
          "d,trigger_0\n"
          "100,true\n"
          "# trigger,0,0,big\n");
}

TEST_CASE("direct expression evaluation against a partial model") {
    TypedSpec spec = typed("input x: Int32\noutput a := x + 1\noutput b := a[-1,0] * 2");
    Trace trace = load_trace_csv("x\n10\n20\n", spec);
    PartialModel partial(spec, trace.length());

    const Expr& b_expr = *spec.outputs[1].expr;
    EvalResult pending = eval_expr(b_expr, 1, partial, trace);
    CHECK(pending.state == EvalState::Pending);

    partial.set("a", 0, 11);
    EvalResult known = eval_expr(b_expr, 1, partial, trace);
    CHECK(known.state == EvalState::Value);
    CHECK(known.value == 22);

    // Position 0 reads a[-1]: out of bounds, so the default applies without
    // consulting the (unknown) column.
    EvalResult dflt = eval_expr(b_expr, 0, partial, trace);
    CHECK(dflt.state == EvalState::Value);
    CHECK(dflt.value == 0);
}

TEST_CASE("checksums are stable across evaluation orders") {
    TypedSpec spec = testutil::load_spec("specs/network.lola");
    Trace trace = load_trace_csv(
        "src,dst,fin,push,syn,length\n"
        "1,213451,false,true,true,10\n"
        "2,213451,true,false,false,20\n"
        "3,4,false,false,true,30\n",
        spec);
    std::uint64_t reference = model_checksum(evaluate(spec, trace));
    CHECK(reference != 0);
    CHECK(model_checksum(evaluate_with_order(spec, trace, 99)) == reference);

    Trace other = load_trace_csv(
        "src,dst,fin,push,syn,length\n"
        "1,213451,false,true,true,10\n"
        "2,213451,true,false,false,20\n"
        "3,4,false,false,true,31\n",
        spec);
    CHECK(model_checksum(evaluate(spec, other)) != reference);
}

TEST_SUITE_END();
