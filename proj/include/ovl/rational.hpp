#pragma once

#include <cstdint>
#include <string>

namespace ovl {

// Exact non-negative rational used for metrics that the display rules
// truncate or round. Kept unreduced; equality compares cross products.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num * b.den == b.num * a.den;
    }
};

// Decimal string with `decimals` digits, truncating toward zero.
// 13/6 with 2 decimals -> "2.16".
std::string format_truncated(const Rational& r, int decimals);

// Decimal string with `decimals` digits, rounding half away from zero.
// 44/17 with 1 decimal -> "2.6".
std::string format_round_half_up(const Rational& r, int decimals);

} // namespace ovl
