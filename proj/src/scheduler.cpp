#include "ovl/scheduler.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ovl/error.hpp"

namespace ovl {

StagePlan asap_schedule(const Dfg& dfg) {
    validate(dfg);

    // Only nodes that reach an Output are scheduled; everything else would
    // occupy IM/RF slots and push garbage words downstream.
    std::unordered_map<std::string, const DfgNode*> by_id;
    for (const DfgNode& n : dfg.nodes) by_id[n.id] = &n;
    std::unordered_set<std::string> live;
    std::vector<const DfgNode*> work;
    for (const DfgNode& n : dfg.nodes)
        if (n.kind == OpKind::Output) work.push_back(&n);
    while (!work.empty()) {
        const DfgNode* n = work.back();
        work.pop_back();
        for (const std::string& op : n->operands)
            if (live.insert(op).second) work.push_back(by_id.at(op));
    }

    const std::map<std::string, int> depth = arith_depths(dfg);
    int max_depth = 0;
    for (const DfgNode& n : dfg.nodes)
        if (is_arith(n.kind) && live.count(n.id))
            max_depth = std::max(max_depth, depth.at(n.id));
    if (max_depth == 0) throw Error("nothing to schedule: no live arithmetic nodes");

    StagePlan plan;
    plan.stages.resize(static_cast<std::size_t>(max_depth));
    for (const DfgNode& n : dfg.nodes) {
        if (n.kind == OpKind::Input) {
            if (live.count(n.id)) {
                plan.input_order.push_back(n.id);
                auto it = dfg.consts.find(n.id);
                if (it != dfg.consts.end()) plan.consts[n.id] = it->second;
            }
        } else if (n.kind == OpKind::Output) {
            plan.output_order.push_back(n.id);
            plan.output_source[n.id] = n.operands[0];
        } else if (live.count(n.id)) {
            plan.stages[static_cast<std::size_t>(depth.at(n.id)) - 1].push_back(
                {n.id, n.kind, n.operands});
        }
    }
    return plan;
}

namespace {

struct Legalizer {
    StagePlan& plan;
    std::unordered_map<std::string, int> stage_of; // stage 0 = inputs, 1.. = plan.stages
    std::set<std::string> taken;
    std::map<std::pair<std::string, int>, std::string> carriers; // (value, stage) -> node id

    explicit Legalizer(StagePlan& p) : plan(p) {
        for (const std::string& in : plan.input_order) {
            stage_of[in] = 0;
            taken.insert(in);
        }
        for (std::size_t s = 0; s < plan.stages.size(); ++s)
            for (const ScheduledNode& n : plan.stages[s]) {
                stage_of[n.id] = static_cast<int>(s) + 1;
                taken.insert(n.id);
            }
        for (const std::string& out : plan.output_order) taken.insert(out);
    }

    std::string fresh_id(const std::string& base) {
        std::string id = base;
        while (!taken.insert(id).second) id += "_";
        return id;
    }

    // Carrier of `value` at `to_stage`, inserting bypass hops as needed.
    std::string carrier_at(const std::string& value, int from_stage, int to_stage) {
        std::string cur = value;
        for (int s = from_stage + 1; s <= to_stage; ++s) {
            auto it = carriers.find({value, s});
            if (it != carriers.end()) {
                cur = it->second;
                continue;
            }
            ScheduledNode byp;
            byp.id = fresh_id("byp_" + value + "_" + std::to_string(s));
            byp.kind = OpKind::Bypass;
            byp.operands = {cur};
            plan.stages[static_cast<std::size_t>(s) - 1].push_back(byp);
            stage_of[byp.id] = s;
            carriers[{value, s}] = byp.id;
            cur = byp.id;
        }
        return cur;
    }
};

} // namespace

StagePlan legalize_bypass(const StagePlan& input_plan) {
    StagePlan plan = input_plan;
    Legalizer lg(plan);
    const int final_stage = static_cast<int>(plan.stages.size());

    // Arithmetic operands must come from the directly preceding stage.
    // Fixing stage s only appends bypasses to stages < s, so a forward
    // sweep with index loops is safe.
    for (int s = 1; s <= final_stage; ++s) {
        auto& stage = plan.stages[static_cast<std::size_t>(s) - 1];
        for (std::size_t i = 0; i < stage.size(); ++i) {
            for (std::string& op : stage[i].operands) {
                const int p = lg.stage_of.at(op);
                if (p < s - 1) op = lg.carrier_at(op, p, s - 1);
            }
        }
    }

    // Outputs are emitted by the final stage; early sources ride a bypass
    // chain the rest of the way.
    for (const std::string& out : plan.output_order) {
        const std::string src = plan.output_source.at(out);
        const int p = lg.stage_of.at(src);
        if (p < final_stage)
            plan.output_source[out] = lg.carrier_at(src, p, final_stage);
    }

    // The final stage is the output stream: reorder it to output
    // declaration order, re-issuing instructions shared by several outputs.
    {
        auto& last = plan.stages[static_cast<std::size_t>(final_stage) - 1];
        std::unordered_map<std::string, const ScheduledNode*> last_by_id;
        for (const ScheduledNode& n : last) last_by_id[n.id] = &n;
        std::vector<ScheduledNode> emit;
        std::unordered_set<std::string> claimed;
        for (const std::string& out : plan.output_order) {
            const std::string src = plan.output_source.at(out);
            const ScheduledNode& n = *last_by_id.at(src);
            if (claimed.insert(src).second) {
                emit.push_back(n);
            } else {
                ScheduledNode dup = n;
                dup.id = lg.fresh_id(src + "_re");
                plan.output_source[out] = dup.id;
                emit.push_back(dup);
            }
        }
        if (emit.size() != last.size())
            throw ContractViolation("final stage holds a node feeding no output");
        last = std::move(emit);
    }

    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
        if (static_cast<int>(plan.stages[s].size()) > kImDepth)
            throw Error("stage " + std::to_string(s + 1) + " needs " +
                        std::to_string(plan.stages[s].size()) + " instructions, exceeding the " +
                        std::to_string(kImDepth) + "-entry instruction memory");
    }
    plan.legalized = true;
    return plan;
}

Schedule allocate(const StagePlan& plan) {
    if (!plan.legalized) throw Error("allocate: plan is not legalized");
    if (plan.stages.empty()) throw Error("allocate: empty plan");

    if (static_cast<int>(plan.input_order.size()) > kRfDepth)
        throw Error("RF overflow: " + std::to_string(plan.input_order.size()) +
                    " stream inputs exceed the " + std::to_string(kRfDepth) +
                    "-entry register file");

    Schedule sched;
    sched.input_order = plan.input_order;
    sched.output_order = plan.output_order;
    sched.consts = plan.consts;

    // RF address of each value visible to the stage being placed: stage 0
    // sees the inputs, stage k+1 sees slot j = result of FU k's j-th
    // instruction.
    std::unordered_map<std::string, int> slot;
    for (std::size_t i = 0; i < plan.input_order.size(); ++i)
        slot[plan.input_order[i]] = static_cast<int>(i);

    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const auto& stage = plan.stages[k];
        if (static_cast<int>(stage.size()) > kImDepth)
            throw Error("stage " + std::to_string(k + 1) + " overflows the instruction memory");

        FuProgram fu;
        fu.fu_index = static_cast<int>(k);
        int max_addr = -1;
        for (const ScheduledNode& n : stage) {
            FuInstr instr;
            instr.op = n.kind;
            auto addr = [&](const std::string& id) {
                auto it = slot.find(id);
                if (it == slot.end())
                    throw ContractViolation("stage " + std::to_string(k + 1) + " node '" +
                                            n.id + "' reads '" + id +
                                            "' which is not in the previous stage");
                return it->second;
            };
            instr.src_a = addr(n.operands[0]);
            instr.src_b = n.operands.size() > 1 ? addr(n.operands[1]) : instr.src_a;
            max_addr = std::max({max_addr, instr.src_a, instr.src_b});
            fu.instrs.push_back(instr);
        }
        fu.expected_loads = max_addr + 1;

        const int produced = static_cast<int>(k == 0 ? plan.input_order.size()
                                                     : plan.stages[k - 1].size());
        if (fu.expected_loads != produced)
            throw ContractViolation("FU " + std::to_string(k) + " receives " +
                                    std::to_string(produced) + " words but reads only " +
                                    std::to_string(fu.expected_loads));

        slot.clear();
        for (std::size_t j = 0; j < stage.size(); ++j)
            slot[stage[j].id] = static_cast<int>(j);
        sched.fu_programs.push_back(std::move(fu));
    }

    sched.ii = compute_ii(sched);
    return sched;
}

int compute_ii(const Schedule& schedule) {
    int ii = 0;
    for (const FuProgram& fu : schedule.fu_programs)
        ii = std::max(ii, fu.expected_loads + static_cast<int>(fu.instrs.size()) + 2);
    return ii;
}

Schedule schedule_dfg(const Dfg& dfg) {
    return allocate(legalize_bypass(asap_schedule(dfg)));
}

std::string schedule_op_text(OpKind op, int a, int b) {
    const char* name = nullptr;
    switch (op) {
    case OpKind::Add: name = "ADD"; break;
    case OpKind::Sub: name = "SUB"; break;
    case OpKind::Mul: name = a == b ? "SQR" : "MUL"; break;
    case OpKind::Bypass: name = "BYP"; break;
    default: throw ContractViolation("schedule_op_text: bad op");
    }
    std::ostringstream out;
    out << name << " (R" << a << " R" << b << ")";
    return out.str();
}

std::string format_cycle_table(const std::vector<std::map<int, std::string>>& by_fu_cells,
                               int fu_count, int cycles) {
    std::vector<std::size_t> width(static_cast<std::size_t>(fu_count));
    for (int k = 0; k < fu_count; ++k) {
        width[static_cast<std::size_t>(k)] = std::string("FU" + std::to_string(k)).size();
        for (const auto& [cycle, text] : by_fu_cells[static_cast<std::size_t>(k)])
            if (cycle <= cycles)
                width[static_cast<std::size_t>(k)] =
                    std::max(width[static_cast<std::size_t>(k)], text.size());
    }
    const std::size_t cyc_width = std::max<std::size_t>(5, std::to_string(cycles).size());

    std::ostringstream out;
    std::string row;
    auto pad = [&](const std::string& s, std::size_t w) {
        row += s;
        row.append(w > s.size() ? w - s.size() : 0, ' ');
    };
    auto flush_row = [&] {
        while (!row.empty() && row.back() == ' ') row.pop_back();
        out << row << "\n";
        row.clear();
    };
    pad("cycle", cyc_width);
    for (int k = 0; k < fu_count; ++k) {
        row += " | ";
        pad("FU" + std::to_string(k), width[static_cast<std::size_t>(k)]);
    }
    flush_row();
    for (int c = 1; c <= cycles; ++c) {
        pad(std::to_string(c), cyc_width);
        for (int k = 0; k < fu_count; ++k) {
            row += " | ";
            auto it = by_fu_cells[static_cast<std::size_t>(k)].find(c);
            pad(it == by_fu_cells[static_cast<std::size_t>(k)].end() ? "" : it->second,
                width[static_cast<std::size_t>(k)]);
        }
        flush_row();
    }
    return out.str();
}

std::string render_schedule_table(const Schedule& schedule, int cycles) {
    const int fu_count = static_cast<int>(schedule.fu_programs.size());
    if (fu_count == 0) throw Error("render_schedule_table: empty schedule");
    const int ii = schedule.ii;

    // First-iteration timing: FU k starts loading two cycles after the
    // upstream FU first issues, triggers the cycle after its last load.
    std::vector<std::int64_t> arrival(static_cast<std::size_t>(fu_count));
    std::vector<std::int64_t> trigger(static_cast<std::size_t>(fu_count));
    for (int k = 0; k < fu_count; ++k) {
        const FuProgram& fu = schedule.fu_programs[static_cast<std::size_t>(k)];
        arrival[static_cast<std::size_t>(k)] =
            k == 0 ? 1 : trigger[static_cast<std::size_t>(k) - 1] + 2;
        trigger[static_cast<std::size_t>(k)] =
            arrival[static_cast<std::size_t>(k)] + fu.expected_loads;
    }

    std::vector<std::map<int, std::string>> cells(static_cast<std::size_t>(fu_count));
    for (int k = 0; k < fu_count; ++k) {
        const FuProgram& fu = schedule.fu_programs[static_cast<std::size_t>(k)];
        for (std::int64_t start = 0;; start += ii) {
            if (arrival[static_cast<std::size_t>(k)] + start > cycles) break;
            for (int j = 0; j < fu.expected_loads; ++j) {
                const std::int64_t c = arrival[static_cast<std::size_t>(k)] + start + j;
                if (c <= cycles)
                    cells[static_cast<std::size_t>(k)][static_cast<int>(c)] =
                        "Load R" + std::to_string(j);
            }
            for (std::size_t j = 0; j < fu.instrs.size(); ++j) {
                const std::int64_t c =
                    trigger[static_cast<std::size_t>(k)] + start + static_cast<std::int64_t>(j);
                const FuInstr& in = fu.instrs[j];
                if (c <= cycles)
                    cells[static_cast<std::size_t>(k)][static_cast<int>(c)] =
                        schedule_op_text(in.op, in.src_a, in.src_b);
            }
        }
    }
    return format_cycle_table(cells, fu_count, cycles);
}

namespace {

const char* kv_op_name(OpKind op) {
    switch (op) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Bypass: return "byp";
    default: throw ContractViolation("kv_op_name: bad op");
    }
}

OpKind kv_op_parse(const std::string& s) {
    if (s == "add") return OpKind::Add;
    if (s == "sub") return OpKind::Sub;
    if (s == "mul") return OpKind::Mul;
    if (s == "byp") return OpKind::Bypass;
    throw Error("schedule file: unknown op '" + s + "'");
}

} // namespace

std::string render_schedule_kv(const Schedule& schedule) {
    std::ostringstream out;
    out << "format ovl-schedule 1\n";
    out << "ii " << schedule.ii << "\n";
    out << "fus " << schedule.fu_programs.size() << "\n";
    out << "inputs";
    for (const std::string& in : schedule.input_order) out << " " << in;
    out << "\n";
    out << "outputs";
    for (const std::string& o : schedule.output_order) out << " " << o;
    out << "\n";
    for (const std::string& in : schedule.input_order) {
        auto it = schedule.consts.find(in);
        if (it != schedule.consts.end())
            out << "const " << in << " " << it->second << "\n";
    }
    for (const FuProgram& fu : schedule.fu_programs) {
        out << "fu " << fu.fu_index << " loads " << fu.expected_loads << "\n";
        for (const FuInstr& in : fu.instrs)
            out << "fu " << fu.fu_index << " instr " << kv_op_name(in.op) << " " << in.src_a
                << " " << in.src_b << "\n";
    }
    return out.str();
}

Schedule parse_schedule_kv(const std::string& text) {
    Schedule sched;
    std::istringstream in(text);
    std::string line;
    bool saw_format = false;
    int fus = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "schedule file line " + std::to_string(lineno);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ls >> tok) toks.push_back(tok);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (!saw_format) {
            if (toks.size() != 3 || toks[0] != "format" || toks[1] != "ovl-schedule" ||
                toks[2] != "1")
                throw Error(where + ": expected `format ovl-schedule 1`");
            saw_format = true;
            continue;
        }
        auto to_int = [&](const std::string& s) {
            try {
                std::size_t pos = 0;
                const long long v = std::stoll(s, &pos);
                if (pos != s.size()) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw Error(where + ": bad number '" + s + "'");
            }
        };
        if (toks[0] == "ii" && toks.size() == 2) {
            sched.ii = static_cast<int>(to_int(toks[1]));
        } else if (toks[0] == "fus" && toks.size() == 2) {
            fus = static_cast<int>(to_int(toks[1]));
            if (fus <= 0 || fus > 255) throw Error(where + ": bad FU count");
            sched.fu_programs.resize(static_cast<std::size_t>(fus));
            for (int k = 0; k < fus; ++k)
                sched.fu_programs[static_cast<std::size_t>(k)].fu_index = k;
        } else if (toks[0] == "inputs") {
            sched.input_order.assign(toks.begin() + 1, toks.end());
        } else if (toks[0] == "outputs") {
            sched.output_order.assign(toks.begin() + 1, toks.end());
        } else if (toks[0] == "const" && toks.size() == 3) {
            sched.consts[toks[1]] = static_cast<std::int32_t>(to_int(toks[2]));
        } else if (toks[0] == "fu" && toks.size() >= 3) {
            const int k = static_cast<int>(to_int(toks[1]));
            if (fus < 0 || k < 0 || k >= fus) throw Error(where + ": FU index out of range");
            FuProgram& fu = sched.fu_programs[static_cast<std::size_t>(k)];
            if (toks[2] == "loads" && toks.size() == 4) {
                fu.expected_loads = static_cast<int>(to_int(toks[3]));
            } else if (toks[2] == "instr" && toks.size() == 6) {
                FuInstr instr;
                instr.op = kv_op_parse(toks[3]);
                instr.src_a = static_cast<int>(to_int(toks[4]));
                instr.src_b = static_cast<int>(to_int(toks[5]));
                if (instr.src_a < 0 || instr.src_a >= kRfDepth || instr.src_b < 0 ||
                    instr.src_b >= kRfDepth)
                    throw Error(where + ": RF address out of range");
                fu.instrs.push_back(instr);
            } else {
                throw Error(where + ": bad fu line");
            }
        } else {
            throw Error(where + ": unknown key '" + toks[0] + "'");
        }
    }
    if (!saw_format) throw Error("schedule file: missing format line");
    if (fus < 0) throw Error("schedule file: missing fus line");
    for (const FuProgram& fu : sched.fu_programs) {
        if (fu.instrs.empty())
            throw Error("schedule file: FU " + std::to_string(fu.fu_index) +
                        " has no instructions");
        if (static_cast<int>(fu.instrs.size()) > kImDepth)
            throw Error("schedule file: FU " + std::to_string(fu.fu_index) + " exceeds IM depth");
    }
    if (sched.ii != compute_ii(sched))
        throw Error("schedule file: ii " + std::to_string(sched.ii) +
                    " does not match the programs (expected " +
                    std::to_string(compute_ii(sched)) + ")");
    return sched;
}

} // namespace ovl
