#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovl/scheduler.hpp"

namespace ovl {

// 32-bit FU instruction word:
//   bits [31:11] ALU configuration (21 bits)
//   bits [10:6]  srcA RF address
//   bits [5:1]   srcB RF address
//   bit  [0]     reserved, 0
// The configuration field is opmode:7 | alumode:4 | inmode:5 | flags:5
// (msb first). Only four patterns exist, modeled on DSP48E1 conventions:
// multiply routes X=M,Y=M; bypass routes X=A:B straight through; add and
// subtract share the three-input ALU opmode and differ in alumode.
struct AluConfig {
    std::uint8_t opmode = 0;  // 7 bits
    std::uint8_t alumode = 0; // 4 bits
    std::uint8_t inmode = 0;  // 5 bits
    std::uint8_t flags = 0;   // 5 bits

    std::uint32_t bits() const; // packed 21-bit value
    friend bool operator==(const AluConfig&, const AluConfig&) = default;
};

AluConfig alu_config_for(OpKind op); // Add, Sub, Mul or Bypass only

struct Instruction {
    std::uint32_t word = 0;

    std::uint32_t config() const { return word >> 11; }
    int src_a() const { return static_cast<int>((word >> 6) & 0x1f); }
    int src_b() const { return static_cast<int>((word >> 1) & 0x1f); }

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

Instruction encode_instruction(OpKind op, int src_a, int src_b);
// Rejects unknown configuration patterns and a set reserved bit.
FuInstr decode_instruction(Instruction instr);

// 40-bit configuration word: tag byte (FU index) + instruction.
struct ContextWord {
    std::uint8_t tag = 0;
    Instruction instr;

    std::uint64_t bits() const {
        return (static_cast<std::uint64_t>(tag) << 32) | instr.word;
    }
    friend bool operator==(const ContextWord&, const ContextWord&) = default;
};

// Sidecar carried next to the raw words. Everything here is recomputable
// from the words themselves (expected loads = 1 + max address read, ii from
// the loads/ops counts); it rides along as a cross-check plus the I/O
// stream naming the words cannot express.
struct ContextSidecar {
    std::vector<std::string> input_order;
    std::vector<std::string> output_order;
    std::map<std::string, std::int32_t> consts;
    std::vector<int> expected_loads;
    int ii = 0;

    friend bool operator==(const ContextSidecar&, const ContextSidecar&) = default;
};

struct ContextImage {
    std::uint8_t version = 1;
    std::uint8_t fu_count = 0;
    std::vector<ContextWord> words; // FU0 first, ascending
    ContextSidecar sidecar;

    friend bool operator==(const ContextImage&, const ContextImage&) = default;
};

ContextImage build_context(const Schedule& schedule);

// File format: magic "OVL1", version u8, fu_count u8, word_count u16 BE,
// word_count x 5 bytes (tag first, instruction big-endian), then the
// sidecar as a u32 BE length-prefixed text block.
std::vector<std::uint8_t> serialize(const ContextImage& img);
ContextImage deserialize(const std::vector<std::uint8_t>& bytes);

// Size of the streamed context in bytes: 5 per 40-bit word.
std::int64_t context_bytes(std::int64_t word_count);

// Instruction lists regrouped by tag; inverse of build_context's flattening.
std::vector<std::vector<FuInstr>> regroup_by_fu(const ContextImage& img);

// One line per word: `FU<k>: <OP> R<a> R<b> [raw=0x__________]`.
std::string disassemble(const ContextImage& img);

const char* isa_mnemonic(OpKind op); // ADD / SUB / MUL / BYP

} // namespace ovl
