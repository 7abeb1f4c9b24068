#pragma once

#include "beds/metrics/bootstrap.hpp"
#include "beds/metrics/stats.hpp"
#include "beds/sim/record.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace beds::report {

// Reads the CSV written by sim::write_records_csv (trajectories are not stored).
std::vector<sim::SimRecord> read_records_csv(std::istream& in);

struct Period {
    std::string label;
    DateWindow range;
};

// "2019-08-01:2020-03-31" with an optional "label=" prefix.
Period parse_period(const std::string& text);

struct BootstrapSpec {
    double delta = 0.25;
    std::int64_t m = metrics::kDefaultBootstrapSamples;
    std::uint64_t seed = 1;
    metrics::ChangeKind kind = metrics::ChangeKind::Relative;
};

// "delta,m,seed"
BootstrapSpec parse_bootstrap(const std::string& text);

enum class DayColumn { Simulated, Original };

struct ReportOptions {
    UnitId unit = "PICUs";
    std::vector<Period> periods;  // empty: one period spanning the records
    bool elective_only = true;
    DayColumn day_column = DayColumn::Simulated;
    bool weekdays = false;
    std::optional<BootstrapSpec> bootstrap;  // needs exactly two periods
    std::optional<std::pair<std::int32_t, std::int32_t>> outliers;
    std::optional<int> acf_lags;
    std::optional<std::int64_t> histogram_width;
    metrics::Deviation deviation = metrics::Deviation::Population;
};

struct Report {
    nlohmann::json body;
    std::vector<metrics::DailySeries> series;  // one per period
    std::optional<metrics::Histogram> histogram;
};

// Throws ValidationError on inconsistent options.
Report build_report(const std::vector<sim::SimRecord>& records, const ReportOptions& opts);

// Flat CSV: one row per (period, weekday-or-all) with the summary columns.
void write_report_csv(std::ostream& out, const Report& r);

// Static SVG charts.
void write_series_svg(std::ostream& out, const std::vector<metrics::DailySeries>& series,
                      const std::string& title);
void write_histogram_svg(std::ostream& out, const metrics::Histogram& h, const std::string& title);

}  // namespace beds::report
