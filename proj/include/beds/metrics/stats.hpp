#pragma once

#include "beds/core/calendar.hpp"
#include "beds/core/model.hpp"
#include "beds/sim/record.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace beds::metrics {

/// Ordered day -> count series. days is strictly increasing; counts parallel.
struct DailySeries {
    std::vector<Day> days;
    std::vector<std::int32_t> counts;
    UnitId unit;
    std::string filter;

    std::size_t size() const { return counts.size(); }
    bool empty() const { return counts.empty(); }
    void push(Day d, std::int32_t c);
    // Sub-series restricted to [range.start, range.end].
    DailySeries slice(const DateWindow& range) const;
};

struct AdmissionRecord {
    Day day;
    UnitId unit;
    bool elective = false;
};

std::vector<AdmissionRecord> admissions_of(std::span<const sim::SimRecord> records);

// Zero-filled count per day of `range` for the given unit.
DailySeries daily_admissions(std::span<const AdmissionRecord> records, const UnitId& unit,
                             bool elective_only, const DateWindow& range);

enum class Deviation { Population, Sample };

struct SummaryStats {
    double mean = 0;
    std::optional<double> coefficient_of_variation;  // absent when mean is 0
    double median = 0;
    double q90 = 0;
    std::optional<double> qmra;  // q90 / median, absent when median is 0
    std::size_t n_days = 0;
};

// Quantile by linear interpolation between order statistics at p * (n - 1).
double quantile(std::span<const std::int32_t> values, double p);

// Throws EmptySeries.
SummaryStats summarize(const DailySeries& series, Deviation dev = Deviation::Population);

inline constexpr std::int32_t kNoUpperBound = std::numeric_limits<std::int32_t>::max();

// Days with count < lo or count > hi.
std::int64_t count_outlier_days(const DailySeries& series, std::int32_t lo = 2,
                                std::int32_t hi = 5);

// Monday..Friday sub-series; weekend days dropped.
std::array<DailySeries, 5> weekday_split(const DailySeries& series);
inline constexpr std::array<const char*, 5> kWeekdayNames{"Monday", "Tuesday", "Wednesday",
                                                          "Thursday", "Friday"};

// Lag-k correlation of the weekday-only sequence for k = 1..max_lag: the
// Pearson correlation of the pairs (x[t], x[t+k]). A lag whose pairs have zero
// variance on either side yields nullopt. Throws SeriesTooShort when the
// weekday sequence has max_lag or fewer entries.
std::vector<std::optional<double>> autocorrelation(const DailySeries& series, int max_lag);

struct Histogram {
    std::int64_t bin_width = 1;
    // lower bin edge -> count; bin k covers [edge, edge + width).
    std::map<std::int64_t, std::int64_t> bins;
    std::int64_t total() const;
};

// Histogram of reschedule deltas. Patients that kept their recorded day
// without passing through the engine are included only on request.
Histogram reschedule_histogram(std::span<const sim::SimRecord> records, std::int64_t bin_width,
                               bool include_unrescheduled = false);

}  // namespace beds::metrics
