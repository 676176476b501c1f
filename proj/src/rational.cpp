#include "ovl/rational.hpp"

#include <cstdio>

#include "ovl/error.hpp"

namespace ovl {

namespace {

std::int64_t pow10(int n) {
    std::int64_t p = 1;
    for (int i = 0; i < n; ++i) p *= 10;
    return p;
}

std::string format_scaled(std::int64_t scaled, int decimals) {
    const std::int64_t scale = pow10(decimals);
    char buf[64];
    if (decimals == 0) {
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(scaled));
    } else {
        std::snprintf(buf, sizeof(buf), "%lld.%0*lld", static_cast<long long>(scaled / scale),
                      decimals, static_cast<long long>(scaled % scale));
    }
    return buf;
}

} // namespace

std::string format_truncated(const Rational& r, int decimals) {
    if (r.den <= 0 || r.num < 0) throw Error("format_truncated: negative rational");
    const std::int64_t scale = pow10(decimals);
    return format_scaled(r.num * scale / r.den, decimals);
}

std::string format_round_half_up(const Rational& r, int decimals) {
    if (r.den <= 0 || r.num < 0) throw Error("format_round_half_up: negative rational");
    const std::int64_t scale = pow10(decimals);
    // floor(x*scale + 1/2) with integer arithmetic
    return format_scaled((2 * r.num * scale + r.den) / (2 * r.den), decimals);
}

} // namespace ovl
