#include <doctest.h>

#include <random>

#include "ovl/error.hpp"
#include "ovl/files.hpp"
#include "ovl/kernel.hpp"
#include "ovl/simulator.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ovl;

namespace {

std::string data_path(const std::string& name) {
    return std::string(OVLC_DATA_DIR) + "/" + name;
}

ContextImage gradient_image() {
    return build_context(
        schedule_dfg(parse_dfg_text(read_text_file(data_path("gradient.dfg")))));
}

// Input vectors for the schedule's non-const stream inputs, drawn from env.
std::vector<std::int32_t> stream_vector(const ContextSidecar& sc,
                                        const std::map<std::string, std::int32_t>& env) {
    std::vector<std::int32_t> vec;
    for (const std::string& in : sc.input_order)
        if (!sc.consts.count(in)) vec.push_back(env.at(in));
    return vec;
}

} // namespace

TEST_CASE("configure fills the IMs and counts one cycle per word") {
    const ContextImage img = gradient_image();
    const PipelineState state = configure(img);
    CHECK(state.fu_count() == 4);
    CHECK(state.config_cycles() == 11);
    CHECK(state.ii() == 11);
    CHECK(state.fu(0).ic == 4);
    CHECK(state.fu(0).expected_loads == 5);
    CHECK(state.fu(3).ic == 1);
    CHECK(state.fu(3).expected_loads == 2);

    ContextImage bad = img;
    bad.words[0].tag = 9;
    CHECK_THROWS_WITH_AS(configure(bad), doctest::Contains("FU 9"), Error);

    ContextImage lying = img;
    lying.sidecar.ii = 7;
    CHECK_THROWS_WITH_AS(configure(lying), doctest::Contains("disagrees"), Error);
}

TEST_CASE("a 256-word image takes 256 configuration cycles") {
    Schedule sched;
    for (int k = 0; k < 8; ++k) {
        FuProgram fu;
        fu.fu_index = k;
        fu.expected_loads = 32;
        for (int j = 0; j < 32; ++j) fu.instrs.push_back({OpKind::Add, 31, j});
        sched.fu_programs.push_back(fu);
    }
    sched.ii = compute_ii(sched);
    CHECK(configure(build_context(sched)).config_cycles() == 256);
}

TEST_CASE("gradient timing anchors from the published schedule") {
    const ContextImage img = gradient_image();
    const SimResult res = run(img, {{3, 5, 2, 1, 4}}, 1);

    REQUIRE(res.outputs.size() == 1);
    CHECK(res.outputs[0] == std::vector<std::int32_t>{15});

    auto find_event = [&](TraceEvent::Action action, int fu,
                          bool first) -> const TraceEvent* {
        const TraceEvent* found = nullptr;
        for (const TraceEvent& e : res.trace)
            if (e.action == action && e.fu == fu) {
                if (first) return &e;
                found = &e;
            }
        return found;
    };

    // FU0 loads cycles 1..5, first SUB at 6
    CHECK(find_event(TraceEvent::Action::Load, 0, true)->cycle == 1);
    CHECK(find_event(TraceEvent::Action::Issue, 0, true)->cycle == 6);
    // FU1's first load lands at 8 (= issue at 6 plus the 2-cycle pipeline)
    CHECK(find_event(TraceEvent::Action::Load, 1, true)->cycle == 8);
    // FU3 issues its ADD at 22; the result reaches the FIFO at 24
    CHECK(find_event(TraceEvent::Action::Issue, 3, true)->cycle == 22);
    CHECK(find_event(TraceEvent::Action::Emit, 3, true)->cycle == 24);
}

TEST_CASE("simulated gradient trace reproduces the golden 32 cycles") {
    const ContextImage img = gradient_image();
    const SimResult res = run(img, {{3, 5, 2, 1, 4}, {1, 2, 3, 4, 5}, {9, 9, 9, 9, 9}}, 3);
    std::vector<TraceEvent> first32;
    for (const TraceEvent& e : res.trace)
        if (e.cycle <= 32) first32.push_back(e);
    const std::string table = render_trace(first32, 4);
    CHECK(table == read_text_file(data_path("golden/gradient_trace_32.txt")));
}

TEST_CASE("three gradient iterations complete 11 cycles apart") {
    const ContextImage img = gradient_image();
    const SimResult res = run(img, {{3, 5, 2, 1, 4}, {1, 2, 3, 4, 5}, {10, 20, 30, 40, 50}}, 3);
    CHECK(res.outputs[0] == std::vector<std::int32_t>{15});
    CHECK(res.outputs[1] == std::vector<std::int32_t>{10});
    CHECK(res.outputs[2] == std::vector<std::int32_t>{1000});
    REQUIRE(res.completion_cycles.size() == 3);
    CHECK(res.completion_cycles[1] - res.completion_cycles[0] == 11);
    CHECK(res.completion_cycles[2] - res.completion_cycles[1] == 11);
    CHECK(res.measured_period == 11);
}

TEST_CASE("all-zero inputs give all-zero outputs") {
    const SimResult res = run(gradient_image(), {{0, 0, 0, 0, 0}}, 1);
    CHECK(res.outputs[0] == std::vector<std::int32_t>{0});
}

TEST_CASE("input underrun and arity errors") {
    const ContextImage img = gradient_image();
    CHECK_THROWS_WITH_AS(run(img, {{1, 2, 3, 4, 5}}, 2), doctest::Contains("underrun"), Error);
    CHECK_THROWS_WITH_AS(run(img, {{1, 2, 3, 4}}, 1), doctest::Contains("words"), Error);
}

TEST_CASE("trace tables: static schedule and simulation agree") {
    const Dfg dfg = parse_dfg_text(read_text_file(data_path("gradient.dfg")));
    const Schedule sched = schedule_dfg(dfg);
    const SimResult res = run(build_context(sched), {{3, 5, 2, 1, 4}, {1, 2, 3, 4, 5}}, 2);
    const int horizon = 2 * sched.ii;
    std::vector<TraceEvent> prefix;
    for (const TraceEvent& e : res.trace)
        if (e.cycle <= horizon) prefix.push_back(e);
    CHECK(render_trace(prefix, 4) == render_schedule_table(sched, horizon));
}

TEST_CASE("empty trace renders a bare header") {
    CHECK(render_trace({}, 2) == "cycle | FU0 | FU1\n");
}

TEST_CASE("trace rows re-parse into the same event list") {
    const SimResult res = run(gradient_image(), {{3, 5, 2, 1, 4}}, 1);
    CHECK(parse_trace_rows(render_trace_rows(res.trace)) == res.trace);

    std::mt19937 rng(17);
    const Dfg dfg = ovl::testing::random_dfg(rng);
    const Schedule sched = schedule_dfg(dfg);
    const ContextImage img = build_context(sched);
    const auto env = ovl::testing::random_env(dfg, rng);
    const SimResult r2 = run(img, {stream_vector(img.sidecar, env)}, 1);
    CHECK(parse_trace_rows(render_trace_rows(r2.trace)) == r2.trace);
}

TEST_CASE("back-pressure pauses the stream while FU0 executes and flushes") {
    const ContextImage img = gradient_image();
    PipelineState state = configure(img);
    for (std::int32_t v : {3, 5, 2, 1, 4, 3, 5, 2, 1, 4}) state.push_input(v);
    std::map<std::int64_t, bool> bp;
    for (int c = 1; c <= 22; ++c) {
        state.step();
        bp[state.cycle()] = state.backpressure();
    }
    for (int c = 1; c <= 5; ++c) CHECK(!bp.at(c));
    for (int c = 6; c <= 11; ++c) CHECK(bp.at(c)); // first issue through period end
    for (int c = 12; c <= 16; ++c) CHECK(!bp.at(c));
    for (int c = 17; c <= 22; ++c) CHECK(bp.at(c));
}

TEST_CASE("constants are injected from the sidecar") {
    const Dfg dfg = lower_to_dfg(parse_kernel("y = x*3 + 1; out y;"));
    const ContextImage img = build_context(schedule_dfg(dfg));
    const SimResult res = run(img, {{5}, {-2}}, 2); // only x is streamed
    CHECK(res.outputs[0] == std::vector<std::int32_t>{16});
    CHECK(res.outputs[1] == std::vector<std::int32_t>{-5});
}

TEST_CASE("oracle equivalence and period correctness on random DFGs") {
    std::mt19937 rng(4242);
    int cases = 0;
    while (cases < 60) {
        const Dfg dfg = ovl::testing::random_dfg(rng);
        const Schedule sched = schedule_dfg(dfg);
        const ContextImage img = build_context(sched);

        const int iterations = 3;
        std::vector<std::map<std::string, std::int32_t>> envs;
        std::vector<std::vector<std::int32_t>> vecs;
        for (int i = 0; i < iterations; ++i) {
            envs.push_back(ovl::testing::random_env(dfg, rng));
            vecs.push_back(stream_vector(img.sidecar, envs.back()));
        }
        const SimResult res = run(img, vecs, iterations);

        for (int i = 0; i < iterations; ++i) {
            const auto expect = evaluate(dfg, envs[static_cast<std::size_t>(i)]);
            const auto& got = res.outputs[static_cast<std::size_t>(i)];
            REQUIRE(got.size() == img.sidecar.output_order.size());
            for (std::size_t j = 0; j < got.size(); ++j)
                CHECK(got[j] == expect.at(img.sidecar.output_order[j]));
        }
        CHECK(res.measured_period == sched.ii);
        CHECK(res.measured_period == compute_ii(sched));
        ++cases;
    }
}

TEST_CASE("steady-state periodicity and producer/consumer conservation") {
    std::mt19937 rng(777);
    for (int i = 0; i < 15; ++i) {
        const Dfg dfg = ovl::testing::random_dfg(rng);
        const Schedule sched = schedule_dfg(dfg);
        const ContextImage img = build_context(sched);
        const int iterations = 4;
        std::vector<std::vector<std::int32_t>> vecs;
        for (int j = 0; j < iterations; ++j)
            vecs.push_back(
                stream_vector(img.sidecar, ovl::testing::random_env(dfg, rng)));
        const SimResult res = run(img, vecs, iterations);

        // loads per FU = iterations x expected_loads
        std::map<int, int> loads;
        for (const TraceEvent& e : res.trace)
            if (e.action == TraceEvent::Action::Load) loads[e.fu]++;
        for (const FuProgram& fu : sched.fu_programs)
            CHECK(loads[fu.fu_index] == iterations * fu.expected_loads);

        // events repeat with period II once the pipeline is full
        const int ii = sched.ii;
        std::map<std::pair<std::int64_t, int>, std::string> shape;
        for (const TraceEvent& e : res.trace) {
            if (e.action == TraceEvent::Action::Emit || e.action == TraceEvent::Action::Stall)
                continue;
            std::string s = e.action == TraceEvent::Action::Load
                                ? "L" + std::to_string(e.a)
                                : "I" + std::to_string(e.a) + ":" + std::to_string(e.b);
            shape[{e.cycle, e.fu}] = s;
        }
        const std::int64_t fill = res.completion_cycles.front();
        for (const auto& [key, s] : shape) {
            const auto& [cycle, fu] = key;
            if (cycle < fill || cycle + ii > res.completion_cycles.back()) continue;
            auto it = shape.find({cycle + ii, fu});
            REQUIRE(it != shape.end());
            CHECK(it->second == s);
        }
    }
}

TEST_CASE("determinism: identical image and inputs give identical traces") {
    const ContextImage img = gradient_image();
    const SimResult a = run(img, {{3, 5, 2, 1, 4}, {7, 8, 9, 1, 2}}, 2);
    const SimResult b = run(img, {{3, 5, 2, 1, 4}, {7, 8, 9, 1, 2}}, 2);
    CHECK(a.trace == b.trace);
    CHECK(a.outputs == b.outputs);
    CHECK(render_trace_rows(a.trace) == render_trace_rows(b.trace));
}

TEST_CASE("a word arriving outside the load window is a contract violation") {
    // Hand-built rate-mismatched chain: FU0 emits 4 words per burst, FU1
    // consumes 3 and is already executing when the fourth lands. allocate()
    // can never produce this; the simulator must catch it loudly.
    Schedule sched;
    FuProgram fu0;
    fu0.fu_index = 0;
    fu0.expected_loads = 1;
    fu0.instrs = {
        {OpKind::Add, 0, 0}, {OpKind::Add, 0, 0}, {OpKind::Add, 0, 0}, {OpKind::Add, 0, 0}};
    sched.fu_programs.push_back(fu0);
    FuProgram fu1;
    fu1.fu_index = 1;
    fu1.expected_loads = 3;
    fu1.instrs = {{OpKind::Add, 0, 2}};
    sched.fu_programs.push_back(fu1);
    sched.ii = compute_ii(sched);
    const ContextImage img = build_context(sched);
    CHECK_THROWS_AS(run(img, {{1}, {2}, {3}}, 3), ContractViolation);
}
