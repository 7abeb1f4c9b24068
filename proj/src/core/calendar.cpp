#include "beds/core/calendar.hpp"

#include "beds/core/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <vector>

namespace beds {

namespace {

std::optional<int> to_int(std::string_view s) {
    if (s.empty() || s.size() > 9) return std::nullopt;
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? s.size() - pos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Parses "Y-M-D" where Y is 4 digits or 2 digits (20YY).
std::optional<std::chrono::sys_days> parse_date_part(std::string_view s) {
    auto parts = split(s, '-');
    if (parts.size() != 3) return std::nullopt;
    auto y = to_int(parts[0]);
    auto m = to_int(parts[1]);
    auto d = to_int(parts[2]);
    if (!y || !m || !d) return std::nullopt;
    int year = *y;
    if (parts[0].size() <= 2) {
        year += 2000;
    } else if (parts[0].size() != 4) {
        return std::nullopt;
    }
    if (*m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{year},
                                    std::chrono::month{static_cast<unsigned>(*m)},
                                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

}  // namespace

Day::Day(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) throw ParseError("invalid calendar date");
    days_ = std::chrono::sys_days{ymd};
}

std::optional<Day> Day::try_parse(std::string_view iso) {
    iso = trim(iso);
    // Strict ISO date: exactly YYYY-MM-DD.
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    auto d = parse_date_part(iso);
    if (!d) return std::nullopt;
    return Day{*d};
}

Day Day::parse(std::string_view iso) {
    auto d = try_parse(iso);
    if (!d) throw ParseError("invalid ISO date '" + std::string(iso) + "'");
    return *d;
}

std::string Day::iso() const {
    auto ymd = this->ymd();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DateWindow::DateWindow(Day s, Day e) : start(s), end(e) {
    if (e < s) throw ValidationError("window end " + e.iso() + " before start " + s.iso());
}

std::optional<DateWindow> window_intersect(const DateWindow& a, const DateWindow& b) {
    Day s = std::max(a.start, b.start);
    Day e = std::min(a.end, b.end);
    if (e < s) return std::nullopt;
    return DateWindow{s, e};
}

std::optional<Timestamp> try_parse_timestamp(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    auto sep = text.find_first_of("T ");
    std::string_view date_part = text.substr(0, sep);
    auto day = parse_date_part(date_part);
    if (!day) return std::nullopt;
    Timestamp t{*day};
    if (sep == std::string_view::npos) return t;

    std::string_view time_part = trim(text.substr(sep + 1));
    if (!time_part.empty() && time_part.back() == 'Z') time_part.remove_suffix(1);
    auto hms = split(time_part, ':');
    if (hms.size() < 2 || hms.size() > 3) return std::nullopt;
    auto h = to_int(hms[0]);
    auto m = to_int(hms[1]);
    std::optional<int> s = 0;
    if (hms.size() == 3) {
        // Fractional seconds are truncated.
        auto sec = hms[2].substr(0, hms[2].find('.'));
        s = to_int(sec);
    }
    if (!h || !m || !s) return std::nullopt;
    if (*h < 0 || *h > 23 || *m < 0 || *m > 59 || *s < 0 || *s > 60) return std::nullopt;
    return t + std::chrono::hours{*h} + std::chrono::minutes{*m} + std::chrono::seconds{*s};
}

std::string format_timestamp(Timestamp t) {
    auto day = std::chrono::floor<std::chrono::days>(t);
    std::chrono::hh_mm_ss hms{t - day};
    std::chrono::year_month_day ymd{day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

}  // namespace beds
