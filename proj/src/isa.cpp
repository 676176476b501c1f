#include "ovl/isa.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "ovl/error.hpp"

namespace ovl {

std::uint32_t AluConfig::bits() const {
    return (static_cast<std::uint32_t>(opmode & 0x7f) << 14) |
           (static_cast<std::uint32_t>(alumode & 0x0f) << 10) |
           (static_cast<std::uint32_t>(inmode & 0x1f) << 5) |
           static_cast<std::uint32_t>(flags & 0x1f);
}

AluConfig alu_config_for(OpKind op) {
    // Modeled on DSP48E1 usage: add/sub share the ALU-path opmode
    // (Z=C, X=A:B) and differ in alumode, multiply selects X=M,Y=M,
    // bypass feeds A:B straight to the output.
    switch (op) {
    case OpKind::Add: return {0b0110011, 0b0000, 0b00000, 0b00000};
    case OpKind::Sub: return {0b0110011, 0b0011, 0b00000, 0b00000};
    case OpKind::Mul: return {0b0000101, 0b0000, 0b10001, 0b00000};
    case OpKind::Bypass: return {0b0000011, 0b0000, 0b00000, 0b00000};
    default: throw Error("alu_config_for: not an FU operation");
    }
}

Instruction encode_instruction(OpKind op, int src_a, int src_b) {
    if (src_a < 0 || src_a >= kRfDepth || src_b < 0 || src_b >= kRfDepth)
        throw Error("encode_instruction: RF address out of range");
    Instruction instr;
    instr.word = (alu_config_for(op).bits() << 11) |
                 (static_cast<std::uint32_t>(src_a) << 6) |
                 (static_cast<std::uint32_t>(src_b) << 1);
    return instr;
}

FuInstr decode_instruction(Instruction instr) {
    if (instr.word & 1u) throw Error("decode_instruction: reserved bit set");
    const std::uint32_t config = instr.config();
    OpKind op;
    if (config == alu_config_for(OpKind::Add).bits()) op = OpKind::Add;
    else if (config == alu_config_for(OpKind::Sub).bits()) op = OpKind::Sub;
    else if (config == alu_config_for(OpKind::Mul).bits()) op = OpKind::Mul;
    else if (config == alu_config_for(OpKind::Bypass).bits()) op = OpKind::Bypass;
    else {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "0x%06x", config);
        throw Error(std::string("decode_instruction: unknown ALU configuration ") + buf);
    }
    return {op, instr.src_a(), instr.src_b()};
}

ContextImage build_context(const Schedule& schedule) {
    if (schedule.fu_programs.empty()) throw Error("build_context: schedule has no FUs");
    if (schedule.fu_programs.size() > 255)
        throw Error("build_context: more than 255 FUs cannot be tagged");

    ContextImage img;
    img.fu_count = static_cast<std::uint8_t>(schedule.fu_programs.size());
    for (const FuProgram& fu : schedule.fu_programs) {
        if (fu.instrs.empty())
            throw Error("build_context: FU " + std::to_string(fu.fu_index) +
                        " has no instructions");
        if (static_cast<int>(fu.instrs.size()) > kImDepth)
            throw Error("build_context: FU " + std::to_string(fu.fu_index) +
                        " exceeds the instruction memory");
        for (const FuInstr& in : fu.instrs)
            img.words.push_back({static_cast<std::uint8_t>(fu.fu_index),
                                 encode_instruction(in.op, in.src_a, in.src_b)});
        img.sidecar.expected_loads.push_back(fu.expected_loads);
    }
    img.sidecar.input_order = schedule.input_order;
    img.sidecar.output_order = schedule.output_order;
    img.sidecar.consts = schedule.consts;
    img.sidecar.ii = schedule.ii;
    return img;
}

namespace {

constexpr char kMagic[4] = {'O', 'V', 'L', '1'};

std::string render_sidecar(const ContextSidecar& sc) {
    std::ostringstream out;
    out << "inputs";
    for (const std::string& in : sc.input_order) out << " " << in;
    out << "\n";
    out << "outputs";
    for (const std::string& o : sc.output_order) out << " " << o;
    out << "\n";
    for (const std::string& in : sc.input_order) {
        auto it = sc.consts.find(in);
        if (it != sc.consts.end()) out << "const " << in << " " << it->second << "\n";
    }
    out << "loads";
    for (int l : sc.expected_loads) out << " " << l;
    out << "\n";
    out << "ii " << sc.ii << "\n";
    return out.str();
}

ContextSidecar parse_sidecar(const std::string& text) {
    ContextSidecar sc;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ls >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        if (toks[0] == "inputs") {
            sc.input_order.assign(toks.begin() + 1, toks.end());
        } else if (toks[0] == "outputs") {
            sc.output_order.assign(toks.begin() + 1, toks.end());
        } else if (toks[0] == "const" && toks.size() == 3) {
            try {
                sc.consts[toks[1]] = static_cast<std::int32_t>(std::stoll(toks[2]));
            } catch (const std::exception&) {
                throw Error("context sidecar: bad const value '" + toks[2] + "'");
            }
        } else if (toks[0] == "loads") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                try {
                    sc.expected_loads.push_back(static_cast<int>(std::stoi(toks[i])));
                } catch (const std::exception&) {
                    throw Error("context sidecar: bad load count '" + toks[i] + "'");
                }
            }
        } else if (toks[0] == "ii" && toks.size() == 2) {
            try {
                sc.ii = std::stoi(toks[1]);
            } catch (const std::exception&) {
                throw Error("context sidecar: bad ii '" + toks[1] + "'");
            }
        } else {
            throw Error("context sidecar: unknown key '" + toks[0] + "'");
        }
    }
    return sc;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

} // namespace

std::vector<std::uint8_t> serialize(const ContextImage& img) {
    if (img.words.size() > 0xffff) throw Error("serialize: too many context words");
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(img.version);
    out.push_back(img.fu_count);
    put_u16(out, static_cast<std::uint16_t>(img.words.size()));
    for (const ContextWord& w : img.words) {
        out.push_back(w.tag);
        out.push_back(static_cast<std::uint8_t>(w.instr.word >> 24));
        out.push_back(static_cast<std::uint8_t>((w.instr.word >> 16) & 0xff));
        out.push_back(static_cast<std::uint8_t>((w.instr.word >> 8) & 0xff));
        out.push_back(static_cast<std::uint8_t>(w.instr.word & 0xff));
    }
    const std::string sidecar = render_sidecar(img.sidecar);
    put_u32(out, static_cast<std::uint32_t>(sidecar.size()));
    out.insert(out.end(), sidecar.begin(), sidecar.end());
    return out;
}

ContextImage deserialize(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (bytes.size() - pos < n) throw Error("deserialize: truncated stream");
    };
    need(8);
    if (!std::equal(kMagic, kMagic + 4, bytes.begin())) throw Error("deserialize: bad magic");
    pos = 4;
    ContextImage img;
    img.version = bytes[pos++];
    if (img.version != 1)
        throw Error("deserialize: unsupported version " + std::to_string(img.version));
    img.fu_count = bytes[pos++];
    const std::size_t word_count = (static_cast<std::size_t>(bytes[pos]) << 8) | bytes[pos + 1];
    pos += 2;
    need(word_count * 5);
    std::vector<int> per_fu(img.fu_count, 0);
    for (std::size_t i = 0; i < word_count; ++i) {
        ContextWord w;
        w.tag = bytes[pos];
        if (w.tag >= img.fu_count)
            throw Error("deserialize: word " + std::to_string(i) + " tagged for FU " +
                        std::to_string(w.tag) + " on a " + std::to_string(img.fu_count) +
                        "-FU chain");
        if (++per_fu[w.tag] > kImDepth)
            throw Error("deserialize: FU " + std::to_string(w.tag) +
                        " receives more than 32 instructions");
        w.instr.word = (static_cast<std::uint32_t>(bytes[pos + 1]) << 24) |
                       (static_cast<std::uint32_t>(bytes[pos + 2]) << 16) |
                       (static_cast<std::uint32_t>(bytes[pos + 3]) << 8) |
                       static_cast<std::uint32_t>(bytes[pos + 4]);
        pos += 5;
        img.words.push_back(w);
    }
    need(4);
    const std::size_t sidecar_len = (static_cast<std::size_t>(bytes[pos]) << 24) |
                                    (static_cast<std::size_t>(bytes[pos + 1]) << 16) |
                                    (static_cast<std::size_t>(bytes[pos + 2]) << 8) |
                                    static_cast<std::size_t>(bytes[pos + 3]);
    pos += 4;
    need(sidecar_len);
    img.sidecar = parse_sidecar(std::string(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                            bytes.begin() +
                                                static_cast<std::ptrdiff_t>(pos + sidecar_len)));
    pos += sidecar_len;
    if (pos != bytes.size()) throw Error("deserialize: trailing bytes after sidecar");
    return img;
}

std::int64_t context_bytes(std::int64_t word_count) {
    if (word_count < 0) throw Error("context_bytes: negative word count");
    return 5 * word_count;
}

std::vector<std::vector<FuInstr>> regroup_by_fu(const ContextImage& img) {
    std::vector<std::vector<FuInstr>> by_fu(img.fu_count);
    for (const ContextWord& w : img.words) {
        if (w.tag >= img.fu_count) throw Error("regroup_by_fu: tag out of range");
        by_fu[w.tag].push_back(decode_instruction(w.instr));
    }
    return by_fu;
}

const char* isa_mnemonic(OpKind op) {
    switch (op) {
    case OpKind::Add: return "ADD";
    case OpKind::Sub: return "SUB";
    case OpKind::Mul: return "MUL";
    case OpKind::Bypass: return "BYP";
    default: throw Error("isa_mnemonic: not an FU operation");
    }
}

std::string disassemble(const ContextImage& img) {
    std::ostringstream out;
    for (const ContextWord& w : img.words) {
        if (w.tag >= img.fu_count) throw Error("disassemble: tag out of range");
        const FuInstr in = decode_instruction(w.instr);
        char raw[16];
        std::snprintf(raw, sizeof(raw), "%010llX",
                      static_cast<unsigned long long>(w.bits()));
        out << "FU" << static_cast<int>(w.tag) << ": " << isa_mnemonic(in.op) << " R"
            << in.src_a << " R" << in.src_b << " [raw=0x" << raw << "]\n";
    }
    return out.str();
}

} // namespace ovl
