#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "ovl/isa.hpp"

namespace ovl {

enum class FuPhase { Loading, Executing, Flushing };

struct TraceEvent {
    enum class Action { Load, Issue, Emit, Stall };
    std::int64_t cycle = 0; // 1-based, as in the paper trace tables
    int fu = 0;
    Action action = Action::Load;
    OpKind op = OpKind::Bypass; // Issue only
    int a = 0;                  // Load: RF slot; Issue: srcA
    int b = 0;                  // Issue: srcB
    std::int32_t value = 0;     // Load: word written; Issue/Emit: result

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// In-flight ALU result: issued at t, visible downstream at t+2.
struct PipeSlot {
    std::int64_t due = 0;
    std::int32_t value = 0;
};

struct FuState {
    std::vector<FuInstr> im;
    int ic = 0; // instructions held
    std::array<std::int32_t, kRfDepth> rf{};
    int dc = 0; // next RF write slot
    int pc = 0;
    int expected_loads = 0;
    FuPhase phase = FuPhase::Loading;
    std::int64_t flush_end = 0; // last cycle of the flush window
    std::deque<PipeSlot> alu_pipe;
};

class PipelineState {
public:
    // Populates the IMs from the tagged words. config_cycles() reports the
    // daisy-chain configuration cost: one cycle per 40-bit word.
    explicit PipelineState(const ContextImage& img);

    // Advance one cycle; returns the events of that cycle.
    std::vector<TraceEvent> step();

    void push_input(std::int32_t word) { in_fifo_.push_back(word); }

    int fu_count() const { return static_cast<int>(fus_.size()); }
    std::int64_t config_cycles() const { return config_cycles_; }
    std::int64_t cycle() const { return cycle_; }
    int ii() const { return ii_; }
    bool backpressure() const { return backpressure_; }
    const FuState& fu(int k) const { return fus_.at(static_cast<std::size_t>(k)); }
    const std::deque<std::int32_t>& out_fifo() const { return out_fifo_; }
    std::deque<std::int32_t>& out_fifo() { return out_fifo_; }
    std::size_t in_fifo_size() const { return in_fifo_.size(); }

private:
    std::vector<FuState> fus_;
    std::deque<std::int32_t> in_fifo_;
    std::deque<std::int32_t> out_fifo_;
    std::int64_t cycle_ = 0; // last completed cycle; first step() runs cycle 1
    std::int64_t config_cycles_ = 0;
    int ii_ = 0;
    bool backpressure_ = false;
    std::int64_t iter_start_ = 0; // cycle of FU0's first load this iteration
};

PipelineState configure(const ContextImage& img);

struct SimResult {
    // outputs[i][j] = value of sidecar.output_order[j] in iteration i.
    std::vector<std::vector<std::int32_t>> outputs;
    std::vector<TraceEvent> trace;
    // Steady-state cycle distance between consecutive iteration completions
    // at the output FIFO; 0 when fewer than two iterations ran.
    std::int64_t measured_period = 0;
    std::int64_t config_cycles = 0;
    std::vector<std::int64_t> completion_cycles;
};

// Feed `iterations` input vectors (non-const stream inputs, sidecar order;
// const inputs are injected from the sidecar) and run to completion.
SimResult run(const ContextImage& img,
              const std::vector<std::vector<std::int32_t>>& inputs,
              int iterations);

// Cycle table over the FU columns, same layout as render_schedule_table.
// Emit/Stall events do not occupy table cells.
std::string render_trace(const std::vector<TraceEvent>& events, int fu_count);

// Machine-readable rows `cycle,fu,action,detail,value`, one per event.
std::string render_trace_rows(const std::vector<TraceEvent>& events);
std::vector<TraceEvent> parse_trace_rows(const std::string& text);

} // namespace ovl
