#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace beds {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

/// A naive Gregorian calendar day. No time zone, no DST.
class Day {
public:
    constexpr Day() = default;
    constexpr explicit Day(std::chrono::sys_days d) : days_(d) {}
    Day(int year, unsigned month, unsigned day);

    static Day parse(std::string_view iso);
    static std::optional<Day> try_parse(std::string_view iso);
    static Day of(Timestamp t) { return Day{std::chrono::floor<std::chrono::days>(t)}; }

    constexpr std::chrono::sys_days sys() const { return days_; }
    std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
    std::chrono::weekday weekday() const { return std::chrono::weekday{days_}; }
    // 0 = Monday ... 6 = Sunday
    unsigned iso_weekday_index() const { return (weekday().iso_encoding() + 6) % 7; }
    bool is_weekend() const { return iso_weekday_index() >= 5; }

    Timestamp at(int hour, int minute = 0, int second = 0) const {
        return Timestamp{days_} + std::chrono::hours{hour} + std::chrono::minutes{minute} +
               std::chrono::seconds{second};
    }
    Timestamp midnight() const { return Timestamp{days_}; }

    std::string iso() const;

    constexpr Day operator+(std::int64_t n) const { return Day{days_ + std::chrono::days{n}}; }
    constexpr Day operator-(std::int64_t n) const { return Day{days_ - std::chrono::days{n}}; }
    constexpr std::int64_t operator-(Day other) const { return (days_ - other.days_).count(); }
    Day& operator+=(std::int64_t n) {
        days_ += std::chrono::days{n};
        return *this;
    }
    Day& operator++() { return *this += 1; }

    constexpr auto operator<=>(const Day&) const = default;

private:
    std::chrono::sys_days days_{};
};

/// Inclusive [start, end] day range.
struct DateWindow {
    Day start;
    Day end;

    DateWindow() = default;
    DateWindow(Day s, Day e);

    bool contains(Day d) const { return start <= d && d <= end; }
    std::int64_t length() const { return (end - start) + 1; }

    bool operator==(const DateWindow&) const = default;
};

std::optional<DateWindow> window_intersect(const DateWindow& a, const DateWindow& b);

// Timestamps. Accepted input forms:
//   YYYY-MM-DD[ T]HH:MM[:SS]   and the two-digit-year export form YY-M-D H:MM[:SS]
// A bare date is accepted as midnight. Output is always ISO-8601 "YYYY-MM-DDTHH:MM:SS".
std::optional<Timestamp> try_parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

// Durations round-trip as integer seconds.
inline std::int64_t to_seconds(Duration d) { return d.count(); }

}  // namespace beds

template <>
struct std::hash<beds::Day> {
    std::size_t operator()(const beds::Day& d) const noexcept {
        return std::hash<long long>{}(d.sys().time_since_epoch().count());
    }
};
