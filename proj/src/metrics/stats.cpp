#include "beds/metrics/stats.hpp"

#include "beds/core/errors.hpp"
#include "beds/metrics/kernels.hpp"
#include "quantile_detail.hpp"

#include <algorithm>
#include <cmath>

namespace beds::metrics {

void DailySeries::push(Day d, std::int32_t c) {
    if (!days.empty() && d <= days.back())
        throw ValidationError("daily series days must be strictly increasing");
    if (c < 0) throw ValidationError("daily series counts must be non-negative");
    days.push_back(d);
    counts.push_back(c);
}

DailySeries DailySeries::slice(const DateWindow& range) const {
    DailySeries out;
    out.unit = unit;
    out.filter = filter;
    auto lo = std::lower_bound(days.begin(), days.end(), range.start);
    auto hi = std::upper_bound(days.begin(), days.end(), range.end);
    auto first = static_cast<std::size_t>(lo - days.begin());
    auto last = static_cast<std::size_t>(hi - days.begin());
    out.days.assign(days.begin() + static_cast<std::ptrdiff_t>(first),
                    days.begin() + static_cast<std::ptrdiff_t>(last));
    out.counts.assign(counts.begin() + static_cast<std::ptrdiff_t>(first),
                      counts.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
}

std::vector<AdmissionRecord> admissions_of(std::span<const sim::SimRecord> records) {
    std::vector<AdmissionRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.simulated_day, r.unit, r.elective});
    return out;
}

DailySeries daily_admissions(std::span<const AdmissionRecord> records, const UnitId& unit,
                             bool elective_only, const DateWindow& range) {
    DailySeries s;
    s.unit = unit;
    s.filter = elective_only ? "elective" : "all";
    const auto n = static_cast<std::size_t>(range.length());
    s.days.reserve(n);
    for (Day d = range.start; d <= range.end; ++d) s.days.push_back(d);
    s.counts.assign(n, 0);
    for (const auto& r : records) {
        if (r.unit != unit || !range.contains(r.day)) continue;
        if (elective_only && !r.elective) continue;
        ++s.counts[static_cast<std::size_t>(r.day - range.start)];
    }
    return s;
}

double quantile(std::span<const std::int32_t> values, double p) {
    if (values.empty()) throw EmptySeries("quantile of an empty sample");
    std::vector<std::int32_t> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double h = p * static_cast<double>(sorted.size() - 1);
    auto k = static_cast<std::size_t>(std::floor(h));
    double frac = h - static_cast<double>(k);
    if (k + 1 >= sorted.size()) return sorted.back();
    return sorted[k] + frac * (sorted[k + 1] - sorted[k]);
}

SummaryStats summarize(const DailySeries& series, Deviation dev) {
    if (series.empty()) throw EmptySeries("cannot summarize an empty series");
    SummaryStats st;
    st.n_days = series.size();
    auto sums = kernels::sum_stats(series.counts);
    const auto n = static_cast<std::int64_t>(series.size());
    st.mean = static_cast<double>(sums.sum) / static_cast<double>(n);
    // n^2 * population variance, exact in integers.
    const std::int64_t scaled_var = n * sums.sum_sq - sums.sum * sums.sum;
    if (st.mean > 0) {
        double var = dev == Deviation::Population
                         ? static_cast<double>(scaled_var) / static_cast<double>(n * n)
                         : (n > 1 ? static_cast<double>(scaled_var) /
                                        static_cast<double>(n * (n - 1))
                                  : 0.0);
        st.coefficient_of_variation = std::sqrt(var) / st.mean;
    }
    // Exact fractions: median = med_num / 2, q90 = q90_num / 10, so the ratio
    // is a quotient of integers and invariant under integer scaling.
    std::vector<std::int32_t> sorted(series.counts);
    std::sort(sorted.begin(), sorted.end());
    auto kth = [&](std::int64_t i) -> std::int64_t { return sorted[static_cast<std::size_t>(i)]; };
    const std::int64_t med_num = detail::quantile_numerator(n, 1, 2, kth);
    const std::int64_t q90_num = detail::quantile_numerator(n, 9, 10, kth);
    st.median = static_cast<double>(med_num) / 2.0;
    st.q90 = static_cast<double>(q90_num) / 10.0;
    if (med_num > 0) st.qmra = static_cast<double>(q90_num * 2) / static_cast<double>(med_num * 10);
    return st;
}

std::int64_t count_outlier_days(const DailySeries& series, std::int32_t lo, std::int32_t hi) {
    return static_cast<std::int64_t>(kernels::count_outside(series.counts, lo, hi));
}

std::array<DailySeries, 5> weekday_split(const DailySeries& series) {
    std::array<DailySeries, 5> out;
    for (std::size_t w = 0; w < 5; ++w) {
        out[w].unit = series.unit;
        out[w].filter = series.filter + ", " + kWeekdayNames[w];
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        auto w = series.days[i].iso_weekday_index();
        if (w < 5) out[w].push(series.days[i], series.counts[i]);
    }
    return out;
}

std::vector<std::optional<double>> autocorrelation(const DailySeries& series, int max_lag) {
    if (max_lag < 1) throw ValidationError("max_lag must be at least 1");
    std::vector<std::int32_t> weekdays;
    weekdays.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        if (!series.days[i].is_weekend()) weekdays.push_back(series.counts[i]);
    if (weekdays.size() <= static_cast<std::size_t>(max_lag))
        throw SeriesTooShort("weekday series has " + std::to_string(weekdays.size()) +
                             " entries, need more than " + std::to_string(max_lag));

    std::vector<std::optional<double>> out;
    out.reserve(static_cast<std::size_t>(max_lag));
    for (int lag = 1; lag <= max_lag; ++lag) {
        auto p = kernels::lagged_pair_sums(weekdays, static_cast<std::size_t>(lag));
        // Integer-exact numerator and variance terms.
        const std::int64_t cov = p.n * p.sxy - p.sx * p.sy;
        const std::int64_t vx = p.n * p.sxx - p.sx * p.sx;
        const std::int64_t vy = p.n * p.syy - p.sy * p.sy;
        if (vx <= 0 || vy <= 0) {
            out.emplace_back(std::nullopt);
            continue;
        }
        double r = vx == vy ? static_cast<double>(cov) / static_cast<double>(vx)
                            : static_cast<double>(cov) /
                                  std::sqrt(static_cast<double>(vx) * static_cast<double>(vy));
        out.emplace_back(r);
    }
    return out;
}

std::int64_t Histogram::total() const {
    std::int64_t t = 0;
    for (const auto& [edge, c] : bins) t += c;
    return t;
}

Histogram reschedule_histogram(std::span<const sim::SimRecord> records, std::int64_t bin_width,
                               bool include_unrescheduled) {
    if (bin_width < 1) throw ValidationError("bin width must be at least 1 day");
    Histogram h;
    h.bin_width = bin_width;
    for (const auto& r : records) {
        if (!r.rescheduled && !include_unrescheduled) continue;
        std::int64_t q = r.delta_days / bin_width;
        if (r.delta_days % bin_width != 0 && r.delta_days < 0) --q;  // floor division
        ++h.bins[q * bin_width];
    }
    return h;
}

}  // namespace beds::metrics
