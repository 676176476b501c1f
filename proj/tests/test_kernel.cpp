#include <doctest.h>

#include <random>

#include "ovl/error.hpp"
#include "ovl/files.hpp"
#include "ovl/kernel.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ovl;

namespace {
std::string data_path(const std::string& name) {
    return std::string(OVLC_DATA_DIR) + "/" + name;
}
} // namespace

TEST_CASE("gradient kernel lowers to the published shape") {
    const KernelProgram prog = parse_kernel(read_text_file(data_path("gradient.k")));
    CHECK(prog.statements.size() == 1);
    CHECK(prog.outputs.size() == 1);
    const Dfg dfg = lower_to_dfg(prog);
    const DfgStats st = stats(dfg);
    CHECK(st.input_count == 5);
    CHECK(st.output_count == 1);
    CHECK(st.op_nodes == 11);
    CHECK(st.graph_depth == 4);
    // first textual use fixes the stream order
    std::vector<std::string> ins;
    for (const DfgNode& n : dfg.nodes)
        if (n.kind == OpKind::Input) ins.push_back(n.id);
    CHECK(ins == std::vector<std::string>{"a", "c", "b", "d", "e"});
}

TEST_CASE("pass-through and error statements") {
    const KernelProgram p = parse_kernel("y = x; out y;");
    const Dfg d = lower_to_dfg(p);
    CHECK(d.nodes.size() == 2); // input x, output y
    CHECK(stats(d).op_nodes == 0);

    CHECK_THROWS_WITH_AS(parse_kernel("y = y + 1; out y;"),
                         doctest::Contains("before its definition"), Error);
    CHECK_THROWS_WITH_AS(parse_kernel("y = 1; y = 2; out y;"),
                         doctest::Contains("reassignment"), Error);
    CHECK_THROWS_WITH_AS(parse_kernel("y = 1; out z;"), doctest::Contains("undeclared output"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_kernel("y = (a+; out y;"), doctest::Contains("line 1"), Error);
    CHECK_THROWS_WITH_AS(parse_kernel(""), doctest::Contains("empty"), Error);
    CHECK_THROWS_WITH_AS(parse_kernel("y = a; out y"), doctest::Contains("expected ';'"),
                         Error);
}

TEST_CASE("minimal square shares the input") {
    const Dfg d = lower_to_dfg(parse_kernel("y = a*a; out y;"));
    REQUIRE(d.nodes.size() == 3);
    CHECK(d.nodes[0].kind == OpKind::Input);
    CHECK(d.nodes[1].kind == OpKind::Mul);
    CHECK(d.nodes[1].operands == std::vector<std::string>{"a", "a"});
    CHECK(d.nodes[2].kind == OpKind::Output);
}

TEST_CASE("hash-consing shares structurally identical subtrees") {
    const Dfg d = lower_to_dfg(parse_kernel("y = (a+b)+(a+b); out y;"));
    const DfgStats st = stats(d);
    CHECK(st.op_nodes == 2);
    CHECK(st.graph_depth == 2);

    // sharing across statements too
    const Dfg d2 = lower_to_dfg(parse_kernel("p = a-c; q = (a-c)*(a-c); out q;"));
    CHECK(stats(d2).op_nodes == 2); // one sub, one mul
}

TEST_CASE("literals become const inputs appended after stream inputs") {
    const Dfg d = lower_to_dfg(parse_kernel("y = a*2 + (-3); out y;"));
    std::vector<std::string> inputs;
    for (const DfgNode& n : d.nodes)
        if (n.kind == OpKind::Input) inputs.push_back(n.id);
    REQUIRE(inputs.size() == 3);
    CHECK(inputs[0] == "a");
    CHECK(d.consts.at(inputs[1]) == 2);
    CHECK(d.consts.at(inputs[2]) == -3);
    CHECK(evaluate(d, {{"a", 10}}).begin()->second == 17);

    // same literal value maps to one node
    const Dfg d3 = lower_to_dfg(parse_kernel("y = a*2 + b*2; out y;"));
    int const_count = 0;
    for (const DfgNode& n : d3.nodes) const_count += d3.consts.count(n.id) ? 1 : 0;
    CHECK(const_count == 1);
}

TEST_CASE("negative literals need parentheses") {
    CHECK_THROWS_AS(parse_kernel("y = -3 + a; out y;"), Error);
    CHECK(lower_to_dfg(parse_kernel("y = (-3) + a; out y;")).consts.size() == 1);
    CHECK_THROWS_AS(parse_kernel("y = a * -3; out y;"), Error);
    CHECK_THROWS_AS(parse_kernel("y = (-a); out y;"), Error);
}

TEST_CASE("precedence and left associativity") {
    // a - b - c = (a-b) - c under wrap arithmetic
    const Dfg d = lower_to_dfg(parse_kernel("y = a - b - c; out y;"));
    const auto out = evaluate(d, {{"a", 10}, {"b", 3}, {"c", 2}});
    CHECK(out.begin()->second == 5);
    // mul binds tighter: a + b*c
    const Dfg d2 = lower_to_dfg(parse_kernel("y = a + b*c; out y;"));
    CHECK(evaluate(d2, {{"a", 1}, {"b", 2}, {"c", 3}}).begin()->second == 7);
}

TEST_CASE("lowering is deterministic") {
    const std::string src = read_text_file(data_path("gradient.k"));
    const std::string once = render_dfg_text(lower_to_dfg(parse_kernel(src)));
    const std::string twice = render_dfg_text(lower_to_dfg(parse_kernel(src)));
    CHECK(once == twice);
}

TEST_CASE("lowered DFGs evaluate like direct interpretation") {
    std::mt19937 rng(11);
    for (int i = 0; i < 120; ++i) {
        const std::string src = ovl::testing::random_kernel_source(rng);
        CAPTURE(src);
        const KernelProgram prog = parse_kernel(src);
        const Dfg dfg = lower_to_dfg(prog);

        std::map<std::string, std::int32_t> env;
        for (const DfgNode& n : dfg.nodes)
            if (n.kind == OpKind::Input && !dfg.consts.count(n.id))
                env[n.id] = ovl::testing::random_word(rng);

        const auto lowered = evaluate(dfg, env);
        const auto direct = ovl::testing::KernelInterpreter(env).run(prog);
        REQUIRE(lowered.size() == direct.size());
        for (const auto& [name, value] : direct) CHECK(lowered.at(name) == value);
    }
}
