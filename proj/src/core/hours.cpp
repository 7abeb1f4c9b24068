#include "beds/core/hours.hpp"

#include "beds/core/errors.hpp"

#include <cmath>
#include <cstdio>

namespace beds {

Hours Hours::from_double(double h) {
    if (!std::isfinite(h)) throw ParseError("non-finite hours value");
    return Hours{static_cast<std::int64_t>(std::llround(h * 100.0))};
}

std::optional<Hours> Hours::try_parse(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;

    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool seen_dot = false;
    bool any_digit = false;
    int round_digit = -1;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') return std::nullopt;
        any_digit = true;
        int v = c - '0';
        if (!seen_dot) {
            whole = whole * 10 + v;
            if (whole > 1'000'000'000) return std::nullopt;
        } else if (frac_digits < 2) {
            frac = frac * 10 + v;
            ++frac_digits;
        } else if (round_digit < 0) {
            round_digit = v;
        }
    }
    if (!any_digit) return std::nullopt;
    while (frac_digits < 2) {
        frac *= 10;
        ++frac_digits;
    }
    std::int64_t c = whole * 100 + frac + (round_digit >= 5 ? 1 : 0);
    return Hours::from_centi(negative ? -c : c);
}

Hours Hours::parse(std::string_view text) {
    auto h = try_parse(text);
    if (!h) throw ParseError("invalid decimal hours '" + std::string(text) + "'");
    return *h;
}

std::string Hours::str() const {
    char buf[32];
    std::int64_t a = centi_ < 0 ? -centi_ : centi_;
    std::snprintf(buf, sizeof buf, "%s%lld.%02lld", centi_ < 0 ? "-" : "",
                  static_cast<long long>(a / 100), static_cast<long long>(a % 100));
    return buf;
}

}  // namespace beds
