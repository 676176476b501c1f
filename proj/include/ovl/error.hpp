#pragma once

#include <stdexcept>
#include <string>

namespace ovl {

// User-facing error: bad source text, malformed files, violated preconditions.
// The CLI maps this to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal invariant violation (e.g. the simulator catching a scheduler bug).
// The CLI maps this to exit code 2.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace ovl
