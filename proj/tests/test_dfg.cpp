#include <doctest.h>

#include <random>

#include "ovl/dfg.hpp"
#include "ovl/error.hpp"
#include "ovl/files.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ovl;

namespace {
std::string data_path(const std::string& name) {
    return std::string(OVLC_DATA_DIR) + "/" + name;
}
} // namespace

TEST_CASE("gradient reference file parses to the published shape") {
    const Dfg dfg = parse_dfg_text(read_text_file(data_path("gradient.dfg")));
    const DfgStats st = stats(dfg);
    CHECK(st.input_count == 5);
    CHECK(st.output_count == 1);
    CHECK(st.op_nodes == 11);
    CHECK(st.graph_depth == 4);
    CHECK(format_truncated(st.avg_parallelism, 2) == "2.75");
    int subs = 0, muls = 0, adds = 0;
    for (const DfgNode& n : dfg.nodes) {
        subs += n.kind == OpKind::Sub;
        muls += n.kind == OpKind::Mul;
        adds += n.kind == OpKind::Add;
    }
    CHECK(subs == 4);
    CHECK(muls == 4);
    CHECK(adds == 3);
}

TEST_CASE("two-node pass-through is a valid empty-arithmetic DFG") {
    const Dfg dfg = parse_dfg_text("i x\no y x\n");
    const DfgStats st = stats(dfg);
    CHECK(dfg.nodes.size() == 2);
    CHECK(st.op_nodes == 0);
    CHECK(st.graph_depth == 0);
    CHECK(st.avg_parallelism == Rational{0, 1});
}

TEST_CASE("parse errors carry line numbers and offending ids") {
    CHECK_THROWS_WITH_AS(parse_dfg_text("i x\nn t add x missing_id\no y t\n"),
                         doctest::Contains("missing_id"), Error);
    CHECK_THROWS_WITH_AS(parse_dfg_text("i x\ni x\n"), doctest::Contains("duplicate id"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_dfg_text("i x\nn t add x\n"), doctest::Contains("line 2"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_dfg_text("i x\nq y x\n"), doctest::Contains("line 2"), Error);
    CHECK_THROWS_WITH_AS(parse_dfg_text("i x\nn t div x x\no y t\n"),
                         doctest::Contains("unknown operation"), Error);
}

TEST_CASE("stats: chain of 7 matches the chebyshev row shape") {
    std::string text = "i x\n";
    std::string prev = "x";
    for (int i = 0; i < 7; ++i) {
        text += "n c" + std::to_string(i) + " mul " + prev + " " + prev + "\n";
        prev = "c" + std::to_string(i);
    }
    text += "o y " + prev + "\n";
    const DfgStats st = stats(parse_dfg_text(text));
    CHECK(st.op_nodes == 7);
    CHECK(st.graph_depth == 7);
    CHECK(format_truncated(st.avg_parallelism, 2) == "1.00");
}

TEST_CASE("stats: 13 ops over 6 levels displays parallelism 2.16") {
    // mibench-shaped: depths 1..6 with op counts 3,3,2,2,2,1
    const char* text = "i a\ni b\ni c\n"
                       "n d1a add a b\nn d1b sub b c\nn d1c mul a c\n"
                       "n d2a add d1a d1b\nn d2b mul d1b d1c\nn d2c sub d1a d1c\n"
                       "n d3a add d2a d2b\nn d3b sub d2b d2c\n"
                       "n d4a mul d3a d3b\nn d4b add d3a d3b\n"
                       "n d5a add d4a d4b\nn d5b sub d4a d4b\n"
                       "n d6 mul d5a d5b\n"
                       "o y d6\n";
    const DfgStats st = stats(parse_dfg_text(text));
    CHECK(st.op_nodes == 13);
    CHECK(st.graph_depth == 6);
    CHECK(format_truncated(st.avg_parallelism, 2) == "2.16");
    CHECK(st.avg_parallelism == Rational{13, 6});
}

TEST_CASE("stats parallelism identity holds as rationals") {
    const Dfg dfg = parse_dfg_text(read_text_file(data_path("gradient.dfg")));
    const DfgStats st = stats(dfg);
    CHECK(st.avg_parallelism.num * 1 == st.op_nodes * 1);
    CHECK(st.avg_parallelism.den == st.graph_depth);
    CHECK(st.avg_parallelism.num == st.avg_parallelism.den * st.op_nodes / st.graph_depth);
}

TEST_CASE("evaluate: gradient reference values") {
    const Dfg dfg = parse_dfg_text(read_text_file(data_path("gradient.dfg")));
    auto out = evaluate(dfg, {{"a", 3}, {"b", 5}, {"c", 2}, {"d", 1}, {"e", 4}});
    CHECK(out.at("y") == 15);
    out = evaluate(dfg, {{"a", 7}, {"b", 7}, {"c", 7}, {"d", 7}, {"e", 7}});
    CHECK(out.at("y") == 0);
}

TEST_CASE("evaluate wraps at 32 bits") {
    const Dfg dfg = parse_dfg_text("i x\nn s mul x x\no y s\n");
    CHECK(evaluate(dfg, {{"x", 1 << 16}}).at("y") == 0);
    CHECK_THROWS_WITH_AS(evaluate(dfg, {}), doctest::Contains("missing input"), Error);
}

TEST_CASE("topological order is stable and rejects cycles") {
    const Dfg dfg = parse_dfg_text(read_text_file(data_path("gradient.dfg")));
    const auto order = topological_order(dfg);
    // inputs first, then subs, then everything else follows its operands
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]->id] = i;
    for (const DfgNode& n : dfg.nodes)
        for (const std::string& op : n.operands) CHECK(pos.at(op) < pos.at(n.id));

    Dfg self;
    self.nodes.push_back({"x", OpKind::Input, {}});
    self.nodes.push_back({"t", OpKind::Add, {"t", "x"}});
    CHECK_THROWS_WITH_AS(topological_order(self), doctest::Contains("cycle"), Error);

    const Dfg single = parse_dfg_text("i only\no out_only only\n");
    CHECK(topological_order(single).front()->id == "only");
}

TEST_CASE("render/parse round-trip on reference and random graphs") {
    const Dfg gradient = parse_dfg_text(read_text_file(data_path("gradient.dfg")));
    CHECK(parse_dfg_text(render_dfg_text(gradient)) == gradient);

    const Dfg tiny = parse_dfg_text("i x\no y x\n");
    CHECK(parse_dfg_text(render_dfg_text(tiny)) == tiny);

    std::mt19937 rng(2024);
    for (int i = 0; i < 50; ++i) {
        const Dfg d = ovl::testing::random_dfg(rng);
        CHECK(parse_dfg_text(render_dfg_text(d)) == d);
    }
}

TEST_CASE("const directives round-trip and self-bind in evaluate") {
    const char* text = "i x\ni k\nn t mul x k\no y t\n#const k 7\n";
    const Dfg dfg = parse_dfg_text(text);
    CHECK(dfg.consts.at("k") == 7);
    CHECK(parse_dfg_text(render_dfg_text(dfg)) == dfg);
    CHECK(evaluate(dfg, {{"x", 6}}).at("y") == 42);
    CHECK_THROWS_AS(parse_dfg_text("i x\no y x\n#const z 1\n"), Error);
    CHECK_THROWS_AS(parse_dfg_text("i x\nn t mul x x\no y t\n#const t 1\n"), Error);
}

TEST_CASE("evaluate agrees with the naive recursive oracle") {
    std::mt19937 rng(7);
    int cases = 0;
    while (cases < 220) {
        const Dfg dfg = ovl::testing::random_dfg(rng);
        const auto env = ovl::testing::random_env(dfg, rng);
        CHECK(evaluate(dfg, env) == ovl::testing::naive_evaluate(dfg, env));
        ++cases;
    }
}
