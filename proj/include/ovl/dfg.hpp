#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ovl/rational.hpp"

namespace ovl {

enum class OpKind {
    Input,
    Output,
    Add,
    Sub,
    Mul,
    Bypass, // introduced by the scheduler only, never present in a user DFG
};

// Operand count for each kind: Input 0, Output/Bypass 1, Add/Sub/Mul 2.
int arity(OpKind kind);
bool is_arith(OpKind kind);
const char* kind_name(OpKind kind); // lowercase, as used in the text format

struct DfgNode {
    std::string id;
    OpKind kind = OpKind::Input;
    std::vector<std::string> operands;

    friend bool operator==(const DfgNode&, const DfgNode&) = default;
};

// Dataflow graph of one straight-line kernel. Node order is the file /
// lowering order and is the tie-breaker for everything downstream.
// `consts` maps synthetic Input nodes to the literal value they stand for;
// simulation harnesses feed those automatically.
struct Dfg {
    std::vector<DfgNode> nodes;
    std::map<std::string, std::int32_t> consts;

    friend bool operator==(const Dfg&, const Dfg&) = default;

    const DfgNode* find(const std::string& id) const;
    // Index of a node id in `nodes`, -1 if absent.
    int index_of(const std::string& id) const;
};

struct DfgStats {
    int input_count = 0;
    int output_count = 0;
    int edge_count = 0; // all directed edges, including edges into Output nodes
    int op_nodes = 0;   // arithmetic nodes only
    int graph_depth = 0;
    Rational avg_parallelism{0, 1}; // op_nodes / graph_depth, 0/1 when depth is 0
};

// Text format, one node per line:
//   i <id>
//   n <id> <add|sub|mul> <src1> <src2>
//   o <id> <src>
// `#` starts a comment; the directive `#const <id> <value>` records the
// constant bound to a synthetic input. Forward references are allowed;
// the graph must be acyclic.
Dfg parse_dfg_text(const std::string& text);
std::string render_dfg_text(const Dfg& dfg);

// Structural validation (arities, operand resolution, duplicate ids,
// output sources, acyclicity). parse_dfg_text always validates; call this
// after building a Dfg by hand.
void validate(const Dfg& dfg);

DfgStats stats(const Dfg& dfg);

// Node order with every node after all of its operands; ties broken by
// declaration order. Throws on a cycle, naming a witness node.
std::vector<const DfgNode*> topological_order(const Dfg& dfg);

// Reference interpreter: 32-bit two's-complement wrap-around arithmetic.
// `inputs` must bind every non-const Input; consts are self-binding.
std::map<std::string, std::int32_t>
evaluate(const Dfg& dfg, const std::map<std::string, std::int32_t>& inputs);

// Per-node depth of the longest arithmetic chain ending at the node
// (Inputs 0, arithmetic 1 + max over operands). Used by stats and the
// scheduler; exposed for tests.
std::map<std::string, int> arith_depths(const Dfg& dfg);

} // namespace ovl
