#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ovl/dfg.hpp"

namespace ovl {

inline constexpr int kImDepth = 32; // instruction memory entries per FU
inline constexpr int kRfDepth = 32; // register file entries per FU

// One node placed on a stage: an arithmetic DFG node or a scheduler-made
// Bypass. Operands name nodes of the previous stage (or Inputs at stage 1)
// once the plan is legalized.
struct ScheduledNode {
    std::string id;
    OpKind kind = OpKind::Add;
    std::vector<std::string> operands;

    friend bool operator==(const ScheduledNode&, const ScheduledNode&) = default;
};

// ASAP plan over the output-reachable part of the DFG. stages[s] runs on
// FU s; Inputs sit conceptually at stage index -1 (FU0's RF).
struct StagePlan {
    std::vector<std::vector<ScheduledNode>> stages;
    std::vector<std::string> input_order;  // live Inputs, declaration order
    std::vector<std::string> output_order; // Output ids, declaration order
    // Output id -> source node id (post-legalization: a final-stage node).
    std::map<std::string, std::string> output_source;
    std::map<std::string, std::int32_t> consts;
    bool legalized = false;
};

struct FuInstr {
    OpKind op = OpKind::Add; // Add, Sub, Mul or Bypass
    int src_a = 0;           // RF address 0..31
    int src_b = 0;           // Bypass carries src_b == src_a

    friend bool operator==(const FuInstr&, const FuInstr&) = default;
};

struct FuProgram {
    int fu_index = 0;
    std::vector<FuInstr> instrs;
    int expected_loads = 0; // words received per iteration = 1 + max address read

    friend bool operator==(const FuProgram&, const FuProgram&) = default;
};

struct Schedule {
    std::vector<FuProgram> fu_programs;
    int ii = 0;
    std::vector<std::string> input_order;  // FU0 RF layout, one stream word each
    std::vector<std::string> output_order; // emission order of the final FU
    std::map<std::string, std::int32_t> consts;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

// Place every output-reachable arithmetic node at its minimal stage.
// Nodes that reach no Output (dead code, unused Inputs) are dropped with
// the schedule; the Dfg itself is untouched. Requires >= 1 live
// arithmetic node.
StagePlan asap_schedule(const Dfg& dfg);

// Insert Bypass nodes so every edge spans exactly one stage boundary and
// every Output is emitted by the final stage. The final stage is reordered
// to output declaration order (it is the stream contract); a source shared
// by several Outputs is re-issued once per extra Output. Throws if a stage
// exceeds the IM depth.
StagePlan legalize_bypass(const StagePlan& plan);

// Assign RF addresses by arrival order and compute the initiation interval.
Schedule allocate(const StagePlan& plan);

// ii = max over FUs of loads + instruction count + 2 (issue-to-result flush).
int compute_ii(const Schedule& schedule);

// asap_schedule + legalize_bypass + allocate.
Schedule schedule_dfg(const Dfg& dfg);

// Static cycle table in the layout of the paper trace tables: a cycle
// column plus one column per FU with `Load Rn` / `OP (Ra Rb)` entries.
// Mul with equal operands prints as SQR.
std::string render_schedule_table(const Schedule& schedule, int cycles);

// Key/value schedule file, the machine-readable counterpart of the table.
std::string render_schedule_kv(const Schedule& schedule);
Schedule parse_schedule_kv(const std::string& text);

// Display + table helpers shared with the simulator.
std::string schedule_op_text(OpKind op, int a, int b); // "SUB (R0 R2)", "SQR (R0 R0)"
std::string format_cycle_table(const std::vector<std::map<int, std::string>>& by_fu_cells,
                               int fu_count, int cycles);

} // namespace ovl
