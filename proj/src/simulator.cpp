#include "ovl/simulator.hpp"

#include <algorithm>
#include <sstream>

#include "ovl/error.hpp"

namespace ovl {

PipelineState::PipelineState(const ContextImage& img) {
    if (img.fu_count == 0 || img.words.empty())
        throw Error("configure: empty context image");
    fus_.resize(img.fu_count);
    for (const ContextWord& w : img.words) {
        if (w.tag >= img.fu_count)
            throw Error("configure: word tagged for FU " + std::to_string(w.tag) + " on a " +
                        std::to_string(img.fu_count) + "-FU chain");
        FuState& fu = fus_[w.tag];
        if (fu.ic >= kImDepth)
            throw Error("configure: FU " + std::to_string(w.tag) + " IM overflow");
        fu.im.push_back(decode_instruction(w.instr));
        fu.ic++;
    }
    // One cycle per 40-bit word through the daisy chain.
    config_cycles_ = static_cast<std::int64_t>(img.words.size());

    // Expected loads and the II are implicit in the programs; the sidecar,
    // when populated, must agree.
    for (std::size_t k = 0; k < fus_.size(); ++k) {
        FuState& fu = fus_[k];
        if (fu.ic == 0)
            throw Error("configure: FU " + std::to_string(k) + " has no instructions");
        int max_addr = 0;
        for (const FuInstr& in : fu.im) max_addr = std::max({max_addr, in.src_a, in.src_b});
        fu.expected_loads = max_addr + 1;
        ii_ = std::max(ii_, fu.expected_loads + fu.ic + 2);
    }
    if (!img.sidecar.expected_loads.empty()) {
        bool ok = img.sidecar.expected_loads.size() == fus_.size();
        for (std::size_t k = 0; ok && k < fus_.size(); ++k)
            ok = img.sidecar.expected_loads[k] == fus_[k].expected_loads;
        if (!ok) throw Error("configure: sidecar load counts disagree with the instructions");
    }
    if (img.sidecar.ii != 0 && img.sidecar.ii != ii_)
        throw Error("configure: sidecar ii " + std::to_string(img.sidecar.ii) +
                    " disagrees with the programs (" + std::to_string(ii_) + ")");
}

PipelineState configure(const ContextImage& img) {
    return PipelineState(img);
}

std::vector<TraceEvent> PipelineState::step() {
    const std::int64_t t = ++cycle_;
    std::vector<TraceEvent> events;

    // Phase upkeep from the previous cycle: flush windows close, and FU0's
    // back-pressure holds the input FIFO until the full II period of the
    // current iteration has elapsed, keeping every FU on the global period.
    for (FuState& fu : fus_) {
        if (fu.phase == FuPhase::Flushing && t > fu.flush_end) {
            fu.phase = FuPhase::Loading;
            fu.dc = 0;
            fu.pc = 0;
        }
    }
    if (backpressure_ && t >= iter_start_ + ii_) backpressure_ = false;

    // A FU triggers on the cycle after its last expected load.
    for (std::size_t k = 0; k < fus_.size(); ++k) {
        FuState& fu = fus_[k];
        if (fu.phase == FuPhase::Loading && fu.dc == fu.expected_loads) {
            fu.phase = FuPhase::Executing;
            fu.pc = 0;
            if (k == 0) backpressure_ = true;
        }
    }

    // Issue one instruction per executing FU; results surface two cycles
    // later (the DSP pipeline).
    for (std::size_t k = 0; k < fus_.size(); ++k) {
        FuState& fu = fus_[k];
        if (fu.phase != FuPhase::Executing) continue;
        const FuInstr& in = fu.im[static_cast<std::size_t>(fu.pc)];
        const std::uint32_t a = static_cast<std::uint32_t>(fu.rf[static_cast<std::size_t>(in.src_a)]);
        const std::uint32_t b = static_cast<std::uint32_t>(fu.rf[static_cast<std::size_t>(in.src_b)]);
        std::uint32_t v = 0;
        switch (in.op) {
        case OpKind::Add: v = a + b; break;
        case OpKind::Sub: v = a - b; break;
        case OpKind::Mul: v = a * b; break;
        case OpKind::Bypass: v = a; break;
        default: throw ContractViolation("step: bad opcode in IM");
        }
        fu.alu_pipe.push_back({t + 2, static_cast<std::int32_t>(v)});
        events.push_back({t, static_cast<int>(k), TraceEvent::Action::Issue, in.op, in.src_a,
                          in.src_b, static_cast<std::int32_t>(v)});
        if (++fu.pc == fu.ic) {
            fu.phase = FuPhase::Flushing;
            fu.flush_end = t + 2;
        }
    }

    // Results issued two cycles ago land in the downstream RF or the
    // output FIFO.
    for (std::size_t k = 0; k < fus_.size(); ++k) {
        FuState& fu = fus_[k];
        while (!fu.alu_pipe.empty() && fu.alu_pipe.front().due <= t) {
            const std::int32_t v = fu.alu_pipe.front().value;
            fu.alu_pipe.pop_front();
            if (k + 1 < fus_.size()) {
                FuState& down = fus_[k + 1];
                if (down.phase != FuPhase::Loading)
                    throw ContractViolation(
                        "cycle " + std::to_string(t) + ": FU " + std::to_string(k + 1) +
                        " received a word outside its load window (schedule violates "
                        "rate-matching)");
                if (down.dc >= kRfDepth)
                    throw ContractViolation("cycle " + std::to_string(t) + ": FU " +
                                            std::to_string(k + 1) + " RF overflow");
                down.rf[static_cast<std::size_t>(down.dc)] = v;
                events.push_back({t, static_cast<int>(k + 1), TraceEvent::Action::Load,
                                  OpKind::Bypass, down.dc, 0, v});
                down.dc++;
            } else {
                out_fifo_.push_back(v);
                events.push_back({t, static_cast<int>(k), TraceEvent::Action::Emit,
                                  OpKind::Bypass, 0, 0, v});
            }
        }
    }

    // FU0 streams one word per cycle from the input FIFO while loading.
    FuState& f0 = fus_[0];
    if (f0.phase == FuPhase::Loading && !backpressure_ && f0.dc < f0.expected_loads) {
        if (!in_fifo_.empty()) {
            const std::int32_t v = in_fifo_.front();
            in_fifo_.pop_front();
            if (f0.dc == 0) iter_start_ = t;
            f0.rf[static_cast<std::size_t>(f0.dc)] = v;
            events.push_back(
                {t, 0, TraceEvent::Action::Load, OpKind::Bypass, f0.dc, 0, v});
            f0.dc++;
        } else if (f0.dc > 0) {
            events.push_back({t, 0, TraceEvent::Action::Stall, OpKind::Bypass, 0, 0, 0});
        }
    }

    return events;
}

SimResult run(const ContextImage& img, const std::vector<std::vector<std::int32_t>>& inputs,
              int iterations) {
    PipelineState state(img);
    const ContextSidecar& sc = img.sidecar;

    // The stream carries one word per FU0 RF slot; slots bound to a const
    // are fed from the sidecar, the rest come from the caller's vectors.
    const int slots = state.fu(0).expected_loads;
    std::vector<const std::int32_t*> const_slot(static_cast<std::size_t>(slots), nullptr);
    int stream_width = slots;
    if (!sc.input_order.empty()) {
        if (static_cast<int>(sc.input_order.size()) != slots)
            throw Error("run: sidecar names " + std::to_string(sc.input_order.size()) +
                        " inputs but FU0 loads " + std::to_string(slots));
        for (std::size_t i = 0; i < sc.input_order.size(); ++i) {
            auto it = sc.consts.find(sc.input_order[i]);
            if (it != sc.consts.end()) {
                const_slot[i] = &it->second;
                stream_width--;
            }
        }
    }

    if (iterations < 0) throw Error("run: negative iteration count");
    if (static_cast<int>(inputs.size()) < iterations)
        throw Error("run: input underrun (need " + std::to_string(iterations) +
                    " vectors, have " + std::to_string(inputs.size()) + ")");
    for (int i = 0; i < iterations; ++i) {
        const auto& vec = inputs[static_cast<std::size_t>(i)];
        if (static_cast<int>(vec.size()) != stream_width)
            throw Error("run: iteration " + std::to_string(i) + " has " +
                        std::to_string(vec.size()) + " words, kernel takes " +
                        std::to_string(stream_width));
        std::size_t next = 0;
        for (int s = 0; s < slots; ++s) {
            const std::int32_t* c = const_slot[static_cast<std::size_t>(s)];
            state.push_input(c ? *c : vec[next++]);
        }
    }

    SimResult res;
    res.config_cycles = state.config_cycles();
    const int out_per_iter = state.fu(state.fu_count() - 1).ic;
    const std::int64_t wanted =
        static_cast<std::int64_t>(iterations) * static_cast<std::int64_t>(out_per_iter);

    // Generous analytic bound: pipeline fill plus one period per iteration.
    const std::int64_t bound =
        (static_cast<std::int64_t>(state.fu_count()) + 4) *
            (static_cast<std::int64_t>(state.ii()) + 2 * kImDepth) +
        static_cast<std::int64_t>(iterations + 2) * state.ii() + 16;

    std::int64_t emitted = 0;
    while (emitted < wanted) {
        if (state.cycle() >= bound)
            throw ContractViolation("run: simulation exceeded its cycle bound");
        std::vector<TraceEvent> ev = state.step();
        for (const TraceEvent& e : ev)
            if (e.action == TraceEvent::Action::Emit) {
                ++emitted;
                if (emitted % out_per_iter == 0)
                    res.completion_cycles.push_back(e.cycle);
            }
        res.trace.insert(res.trace.end(), ev.begin(), ev.end());
    }

    std::deque<std::int32_t>& fifo = state.out_fifo();
    for (int i = 0; i < iterations; ++i) {
        std::vector<std::int32_t> vec;
        for (int j = 0; j < out_per_iter; ++j) {
            vec.push_back(fifo.front());
            fifo.pop_front();
        }
        res.outputs.push_back(std::move(vec));
    }
    if (res.completion_cycles.size() >= 2)
        res.measured_period = res.completion_cycles.back() -
                              res.completion_cycles[res.completion_cycles.size() - 2];
    return res;
}

std::string render_trace(const std::vector<TraceEvent>& events, int fu_count) {
    std::vector<std::map<int, std::string>> cells(static_cast<std::size_t>(fu_count));
    int max_cycle = 0;
    for (const TraceEvent& e : events) {
        max_cycle = std::max(max_cycle, static_cast<int>(e.cycle));
        if (e.fu < 0 || e.fu >= fu_count) continue;
        if (e.action == TraceEvent::Action::Load)
            cells[static_cast<std::size_t>(e.fu)][static_cast<int>(e.cycle)] =
                "Load R" + std::to_string(e.a);
        else if (e.action == TraceEvent::Action::Issue)
            cells[static_cast<std::size_t>(e.fu)][static_cast<int>(e.cycle)] =
                schedule_op_text(e.op, e.a, e.b);
    }
    return format_cycle_table(cells, fu_count, max_cycle);
}

std::string render_trace_rows(const std::vector<TraceEvent>& events) {
    std::ostringstream out;
    out << "cycle,fu,action,detail,value\n";
    for (const TraceEvent& e : events) {
        out << e.cycle << "," << e.fu << ",";
        switch (e.action) {
        case TraceEvent::Action::Load:
            out << "load,R" << e.a << "," << e.value;
            break;
        case TraceEvent::Action::Issue:
            out << "issue," << isa_mnemonic(e.op) << " R" << e.a << " R" << e.b << ","
                << e.value;
            break;
        case TraceEvent::Action::Emit: out << "emit,," << e.value; break;
        case TraceEvent::Action::Stall: out << "stall,,0"; break;
        }
        out << "\n";
    }
    return out.str();
}

namespace {

OpKind mnemonic_to_op(const std::string& m) {
    if (m == "ADD") return OpKind::Add;
    if (m == "SUB") return OpKind::Sub;
    if (m == "MUL") return OpKind::Mul;
    if (m == "BYP") return OpKind::Bypass;
    throw Error("trace rows: unknown mnemonic '" + m + "'");
}

} // namespace

std::vector<TraceEvent> parse_trace_rows(const std::string& text) {
    std::vector<TraceEvent> events;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line == "cycle,fu,action,detail,value") continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 5)
            throw Error("trace rows line " + std::to_string(lineno) + ": expected 5 fields");
        TraceEvent e;
        try {
            e.cycle = std::stoll(fields[0]);
            e.fu = std::stoi(fields[1]);
            e.value = static_cast<std::int32_t>(std::stoll(fields[4]));
        } catch (const std::exception&) {
            throw Error("trace rows line " + std::to_string(lineno) + ": bad number");
        }
        const std::string& action = fields[2];
        const std::string& detail = fields[3];
        if (action == "load") {
            e.action = TraceEvent::Action::Load;
            if (detail.size() < 2 || detail[0] != 'R')
                throw Error("trace rows line " + std::to_string(lineno) + ": bad load detail");
            e.a = std::stoi(detail.substr(1));
        } else if (action == "issue") {
            e.action = TraceEvent::Action::Issue;
            std::istringstream ds(detail);
            std::string m, ra, rb;
            if (!(ds >> m >> ra >> rb) || ra[0] != 'R' || rb[0] != 'R')
                throw Error("trace rows line " + std::to_string(lineno) + ": bad issue detail");
            e.op = mnemonic_to_op(m);
            e.a = std::stoi(ra.substr(1));
            e.b = std::stoi(rb.substr(1));
        } else if (action == "emit") {
            e.action = TraceEvent::Action::Emit;
        } else if (action == "stall") {
            e.action = TraceEvent::Action::Stall;
        } else {
            throw Error("trace rows line " + std::to_string(lineno) + ": unknown action '" +
                        action + "'");
        }
        events.push_back(e);
    }
    return events;
}

} // namespace ovl
