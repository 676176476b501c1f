#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ovl/dfg.hpp"

namespace ovl {

// Expression tree of the kernel language: variables, decimal literals and
// the three binary operators the FU datapath supports.
struct ExprNode {
    enum class Kind { Var, Literal, Binary };
    Kind kind = Kind::Var;
    std::string name;          // Var
    std::int32_t value = 0;    // Literal
    char op = 0;               // Binary: '+', '-', '*'
    std::unique_ptr<ExprNode> lhs, rhs;
    int line = 0, col = 0;     // source position of Var references
};

using ExprPtr = std::unique_ptr<ExprNode>;

struct KernelStatement {
    std::string target;
    ExprPtr expr;
};

// A straight-line kernel: single-assignment statements plus `out` declarations.
struct KernelProgram {
    std::vector<KernelStatement> statements;
    std::vector<std::string> outputs; // declared via `out <ident>;`
};

// Grammar:
//   program := stmt+
//   stmt    := ident "=" expr ";" | "out" ident ";"
//   expr    := term (("+"|"-") term)*
//   term    := factor ("*" factor)*
//   factor  := ident | integer | "(" expr ")"
// `//` comments. A literal may carry a leading '-' only directly inside
// parentheses. Errors carry line:column positions.
KernelProgram parse_kernel(const std::string& text);

// Lower to a Dfg. Free variables become Input nodes in first-use order,
// integer literals become synthetic const Inputs appended after them, and
// structurally identical subexpressions are shared (hash-consing). Each
// `out` declaration becomes an Output node.
Dfg lower_to_dfg(const KernelProgram& prog);

} // namespace ovl
