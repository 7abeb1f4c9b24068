#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace beds {

/// Decimal hours with 0.01 h resolution, stored as an exact integer count of
/// hundredths. All ledger comparisons go through this type so that
/// "remaining >= duration" never depends on binary rounding.
class Hours {
public:
    constexpr Hours() = default;

    static constexpr Hours from_centi(std::int64_t c) { return Hours{c}; }
    // Rounds half away from zero to the nearest hundredth.
    static Hours from_double(double h);
    static Hours parse(std::string_view text);
    static std::optional<Hours> try_parse(std::string_view text);

    constexpr std::int64_t centi() const { return centi_; }
    double to_double() const { return static_cast<double>(centi_) / 100.0; }
    std::string str() const;

    constexpr Hours operator+(Hours o) const { return Hours{centi_ + o.centi_}; }
    constexpr Hours operator-(Hours o) const { return Hours{centi_ - o.centi_}; }
    Hours& operator+=(Hours o) {
        centi_ += o.centi_;
        return *this;
    }
    Hours& operator-=(Hours o) {
        centi_ -= o.centi_;
        return *this;
    }
    constexpr auto operator<=>(const Hours&) const = default;

private:
    constexpr explicit Hours(std::int64_t c) : centi_(c) {}
    std::int64_t centi_ = 0;
};

inline constexpr Hours min(Hours a, Hours b) { return a < b ? a : b; }

}  // namespace beds
