#include "ovl/dfg.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ovl/error.hpp"

namespace ovl {

int arity(OpKind kind) {
    switch (kind) {
    case OpKind::Input: return 0;
    case OpKind::Output:
    case OpKind::Bypass: return 1;
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul: return 2;
    }
    throw ContractViolation("arity: bad OpKind");
}

bool is_arith(OpKind kind) {
    return kind == OpKind::Add || kind == OpKind::Sub || kind == OpKind::Mul;
}

const char* kind_name(OpKind kind) {
    switch (kind) {
    case OpKind::Input: return "input";
    case OpKind::Output: return "output";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Bypass: return "bypass";
    }
    throw ContractViolation("kind_name: bad OpKind");
}

const DfgNode* Dfg::find(const std::string& id) const {
    for (const DfgNode& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

int Dfg::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
}

namespace {

bool valid_id(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::int32_t parse_i32(const std::string& tok, const std::string& where) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw Error(where + ": bad integer '" + tok + "'");
    }
    if (pos != tok.size() || v < INT32_MIN || v > INT32_MAX)
        throw Error(where + ": integer out of 32-bit range '" + tok + "'");
    return static_cast<std::int32_t>(v);
}

} // namespace

Dfg parse_dfg_text(const std::string& text) {
    Dfg dfg;
    std::vector<std::pair<std::string, std::int32_t>> const_directives;
    std::vector<std::pair<int, const DfgNode*>> node_lines;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno);
        std::vector<std::string> toks = split_ws(line);
        if (!toks.empty() && toks[0] == "#const") {
            if (toks.size() != 3) throw Error(where + ": #const takes an id and a value");
            const_directives.emplace_back(toks[1], parse_i32(toks[2], where));
            continue;
        }
        // strip comment
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (!toks[i].empty() && toks[i][0] == '#') {
                toks.resize(i);
                break;
            }
        }
        if (toks.empty()) continue;

        DfgNode node;
        if (toks[0] == "i") {
            if (toks.size() != 2) throw Error(where + ": expected `i <id>`");
            node.kind = OpKind::Input;
            node.id = toks[1];
        } else if (toks[0] == "o") {
            if (toks.size() != 3) throw Error(where + ": expected `o <id> <src>`");
            node.kind = OpKind::Output;
            node.id = toks[1];
            node.operands = {toks[2]};
        } else if (toks[0] == "n") {
            if (toks.size() != 5)
                throw Error(where + ": expected `n <id> <add|sub|mul> <src1> <src2>`");
            node.id = toks[1];
            if (toks[2] == "add") node.kind = OpKind::Add;
            else if (toks[2] == "sub") node.kind = OpKind::Sub;
            else if (toks[2] == "mul") node.kind = OpKind::Mul;
            else throw Error(where + ": unknown operation '" + toks[2] + "'");
            node.operands = {toks[3], toks[4]};
        } else {
            throw Error(where + ": unknown line form '" + toks[0] + "'");
        }
        if (!valid_id(node.id)) throw Error(where + ": bad node id '" + node.id + "'");
        for (const std::string& op : node.operands)
            if (!valid_id(op)) throw Error(where + ": bad operand id '" + op + "'");
        if (dfg.find(node.id)) throw Error(where + ": duplicate id '" + node.id + "'");
        dfg.nodes.push_back(std::move(node));
    }

    for (const auto& [id, value] : const_directives) {
        const DfgNode* n = dfg.find(id);
        if (!n) throw Error("#const: unknown node '" + id + "'");
        if (n->kind != OpKind::Input) throw Error("#const: '" + id + "' is not an input");
        if (dfg.consts.count(id)) throw Error("#const: duplicate binding for '" + id + "'");
        dfg.consts[id] = value;
    }

    validate(dfg);
    return dfg;
}

std::string render_dfg_text(const Dfg& dfg) {
    std::ostringstream out;
    for (const DfgNode& n : dfg.nodes) {
        switch (n.kind) {
        case OpKind::Input: out << "i " << n.id << "\n"; break;
        case OpKind::Output: out << "o " << n.id << " " << n.operands[0] << "\n"; break;
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul:
            out << "n " << n.id << " " << kind_name(n.kind) << " " << n.operands[0] << " "
                << n.operands[1] << "\n";
            break;
        case OpKind::Bypass: throw Error("render_dfg_text: Bypass node in DFG");
        }
    }
    for (const DfgNode& n : dfg.nodes) {
        auto it = dfg.consts.find(n.id);
        if (it != dfg.consts.end()) out << "#const " << n.id << " " << it->second << "\n";
    }
    return out.str();
}

void validate(const Dfg& dfg) {
    std::unordered_map<std::string, const DfgNode*> by_id;
    for (const DfgNode& n : dfg.nodes) {
        if (n.kind == OpKind::Bypass)
            throw Error("node '" + n.id + "': bypass is not a DFG operation");
        if (static_cast<int>(n.operands.size()) != arity(n.kind))
            throw Error("node '" + n.id + "': arity mismatch for " + kind_name(n.kind));
        if (!by_id.emplace(n.id, &n).second)
            throw Error("duplicate id '" + n.id + "'");
    }
    for (const DfgNode& n : dfg.nodes) {
        for (const std::string& op : n.operands) {
            auto it = by_id.find(op);
            if (it == by_id.end())
                throw Error("node '" + n.id + "': unknown operand id '" + op + "'");
            if (it->second->kind == OpKind::Output)
                throw Error("node '" + n.id + "': operand '" + op + "' is an output");
        }
    }
    for (const auto& [id, value] : dfg.consts) {
        (void)value;
        auto it = by_id.find(id);
        if (it == by_id.end()) throw Error("const binding for unknown node '" + id + "'");
        if (it->second->kind != OpKind::Input)
            throw Error("const binding for non-input '" + id + "'");
    }
    topological_order(dfg); // throws on a cycle
}

std::vector<const DfgNode*> topological_order(const Dfg& dfg) {
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < dfg.nodes.size(); ++i)
        index[dfg.nodes[i].id] = static_cast<int>(i);

    std::vector<int> pending(dfg.nodes.size(), 0);
    std::vector<std::vector<int>> consumers(dfg.nodes.size());
    for (std::size_t i = 0; i < dfg.nodes.size(); ++i) {
        for (const std::string& op : dfg.nodes[i].operands) {
            auto it = index.find(op);
            if (it == index.end())
                throw Error("node '" + dfg.nodes[i].id + "': unknown operand id '" + op + "'");
            // self-reference is the smallest cycle; count it like any edge
            pending[i]++;
            consumers[it->second].push_back(static_cast<int>(i));
        }
    }

    // Kahn's algorithm over declaration indices keeps ready ties in
    // declaration order.
    std::vector<const DfgNode*> order;
    order.reserve(dfg.nodes.size());
    std::vector<int> ready;
    for (std::size_t i = 0; i < dfg.nodes.size(); ++i)
        if (pending[i] == 0) ready.push_back(static_cast<int>(i));
    std::size_t head = 0;
    while (head < ready.size()) {
        // pick the smallest pending-free declaration index
        std::size_t best = head;
        for (std::size_t j = head + 1; j < ready.size(); ++j)
            if (ready[j] < ready[best]) best = j;
        std::swap(ready[head], ready[best]);
        const int i = ready[head++];
        order.push_back(&dfg.nodes[static_cast<std::size_t>(i)]);
        for (int c : consumers[static_cast<std::size_t>(i)])
            if (--pending[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    if (order.size() != dfg.nodes.size()) {
        for (std::size_t i = 0; i < dfg.nodes.size(); ++i)
            if (pending[i] > 0)
                throw Error("cycle detected through node '" + dfg.nodes[i].id + "'");
    }
    return order;
}

std::map<std::string, int> arith_depths(const Dfg& dfg) {
    std::map<std::string, int> depth;
    for (const DfgNode* n : topological_order(dfg)) {
        int d = 0;
        for (const std::string& op : n->operands) d = std::max(d, depth.at(op));
        if (is_arith(n->kind)) d += 1;
        depth[n->id] = d;
    }
    return depth;
}

DfgStats stats(const Dfg& dfg) {
    DfgStats s;
    const std::map<std::string, int> depth = arith_depths(dfg);
    for (const DfgNode& n : dfg.nodes) {
        s.edge_count += static_cast<int>(n.operands.size());
        switch (n.kind) {
        case OpKind::Input: s.input_count++; break;
        case OpKind::Output:
            s.output_count++;
            s.graph_depth = std::max(s.graph_depth, depth.at(n.operands[0]));
            break;
        default: s.op_nodes++; break;
        }
    }
    if (s.graph_depth > 0)
        s.avg_parallelism = Rational{s.op_nodes, s.graph_depth};
    return s;
}

std::map<std::string, std::int32_t>
evaluate(const Dfg& dfg, const std::map<std::string, std::int32_t>& inputs) {
    std::map<std::string, std::int32_t> value;
    std::map<std::string, std::int32_t> outputs;
    for (const DfgNode* n : topological_order(dfg)) {
        std::uint32_t v = 0;
        switch (n->kind) {
        case OpKind::Input: {
            auto it = inputs.find(n->id);
            if (it != inputs.end()) {
                v = static_cast<std::uint32_t>(it->second);
            } else {
                auto ct = dfg.consts.find(n->id);
                if (ct == dfg.consts.end())
                    throw Error("missing input binding for '" + n->id + "'");
                v = static_cast<std::uint32_t>(ct->second);
            }
            break;
        }
        case OpKind::Output:
        case OpKind::Bypass:
            v = static_cast<std::uint32_t>(value.at(n->operands[0]));
            break;
        case OpKind::Add:
            v = static_cast<std::uint32_t>(value.at(n->operands[0])) +
                static_cast<std::uint32_t>(value.at(n->operands[1]));
            break;
        case OpKind::Sub:
            v = static_cast<std::uint32_t>(value.at(n->operands[0])) -
                static_cast<std::uint32_t>(value.at(n->operands[1]));
            break;
        case OpKind::Mul:
            v = static_cast<std::uint32_t>(value.at(n->operands[0])) *
                static_cast<std::uint32_t>(value.at(n->operands[1]));
            break;
        }
        value[n->id] = static_cast<std::int32_t>(v);
        if (n->kind == OpKind::Output) outputs[n->id] = static_cast<std::int32_t>(v);
    }
    return outputs;
}

} // namespace ovl
