#include <doctest.h>

#include "beds/core/errors.hpp"
#include "beds/metrics/bootstrap.hpp"
#include "beds/metrics/kernels.hpp"
#include "beds/metrics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace beds;
using namespace beds::metrics;

namespace {

const Day kMon = Day::parse("2024-01-01");

DailySeries series_of(std::vector<std::int32_t> counts, Day start = kMon) {
    DailySeries s;
    s.unit = "PICUs";
    for (std::size_t i = 0; i < counts.size(); ++i) s.push(start + static_cast<int>(i), counts[i]);
    return s;
}

// Weekday-only series (Mon..Fri repeated) starting on a Monday.
DailySeries weekday_series(const std::vector<std::int32_t>& counts) {
    DailySeries s;
    Day d = kMon;
    for (auto c : counts) {
        while (d.is_weekend()) ++d;
        s.push(d, c);
        ++d;
    }
    return s;
}

// Floating-point oracle with the textbook formulas; independent of the
// integer/fraction path in summarize().
struct OracleStats {
    double mean, cov, median, q90;
};

OracleStats oracle_stats(std::vector<std::int32_t> v) {
    double n = static_cast<double>(v.size());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0;
    for (auto x : v) ss += (x - mean) * (x - mean);
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        double h = p * (n - 1);
        double lo = std::floor(h);
        double hi = std::ceil(h);
        return v[static_cast<std::size_t>(lo)] +
               (h - lo) * (v[static_cast<std::size_t>(hi)] - v[static_cast<std::size_t>(lo)]);
    };
    return {mean, std::sqrt(ss / n) / mean, q(0.5), q(0.9)};
}

}  // namespace

TEST_CASE("summarize hand oracles") {
    auto c = summarize(series_of({2, 2, 2, 2}));
    CHECK(c.mean == 2.0);
    CHECK(*c.coefficient_of_variation == 0.0);
    CHECK(c.median == 2.0);
    CHECK(c.q90 == 2.0);
    CHECK(*c.qmra == 1.0);

    auto two = summarize(series_of({1, 3}));
    CHECK(two.mean == 2.0);
    CHECK(*two.coefficient_of_variation == doctest::Approx(0.5).epsilon(1e-12));

    auto ten = summarize(series_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
    CHECK(std::abs(ten.median - 5.5) < 1e-9);
    CHECK(std::abs(ten.q90 - 9.1) < 1e-9);
    CHECK(std::abs(*ten.qmra - 1.6545454545454545) < 1e-9);
    auto ten_sample = summarize(series_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), Deviation::Sample);
    CHECK(std::abs(*ten_sample.coefficient_of_variation - 0.5504818825631803) < 1e-12);

    // Frozen from numpy (np.quantile linear, np.std population).
    auto mixed = summarize(series_of({0, 3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5}));
    CHECK(std::abs(mixed.mean - 3.6666666666666665) < 1e-12);
    CHECK(std::abs(*mixed.coefficient_of_variation - 0.6618281717527744) < 1e-12);
    CHECK(std::abs(mixed.median - 3.5) < 1e-12);
    CHECK(std::abs(mixed.q90 - 5.9) < 1e-12);
    CHECK(std::abs(*mixed.qmra - 1.6857142857142857) < 1e-12);
}

TEST_CASE("summarize edge cases") {
    CHECK_THROWS_AS(summarize(DailySeries{}), EmptySeries);
    auto zeros = summarize(series_of({0, 0, 0, 1}));
    CHECK_FALSE(zeros.qmra);
    CHECK(zeros.median == 0.0);
    auto allzero = summarize(series_of({0, 0}));
    CHECK_FALSE(allzero.coefficient_of_variation);
}

TEST_CASE("summarize agrees with the floating-point oracle on random series") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 300; ++t) {
        std::vector<std::int32_t> v(1 + rng() % 300);
        for (auto& x : v) x = static_cast<std::int32_t>(rng() % 12);
        v[0] = 1 + static_cast<std::int32_t>(rng() % 5);
        auto got = summarize(series_of(v));
        auto want = oracle_stats(v);
        CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-12));
        CHECK(*got.coefficient_of_variation == doctest::Approx(want.cov).epsilon(1e-9));
        CHECK(std::abs(got.median - want.median) < 1e-9);
        CHECK(std::abs(got.q90 - want.q90) < 1e-9);
        CHECK(std::abs(quantile(v, 0.9) - want.q90) < 1e-9);
        // CoV is zero exactly when the series is constant.
        bool constant = std::all_of(v.begin(), v.end(), [&](auto x) { return x == v[0]; });
        CHECK((*got.coefficient_of_variation == 0.0) == constant);
    }
}

TEST_CASE("qmra is exactly invariant under integer scaling") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 500; ++t) {
        std::vector<std::int32_t> v(2 + rng() % 200);
        for (auto& x : v) x = 1 + static_cast<std::int32_t>(rng() % 9);
        auto base = summarize(series_of(v));
        for (std::int32_t c : {2, 3, 7, 100}) {
            auto scaled = v;
            for (auto& x : scaled) x *= c;
            auto s = summarize(series_of(scaled));
            REQUIRE(s.qmra);
            CHECK(*s.qmra == *base.qmra);
            CHECK(*s.coefficient_of_variation == doctest::Approx(*base.coefficient_of_variation));
        }
    }
}

TEST_CASE("count_outlier_days") {
    CHECK(count_outlier_days(series_of({0, 2, 6, 5}), 2, 5) == 2);
    CHECK(count_outlier_days(series_of({2, 3, 4, 5}), 2, 5) == 0);
    CHECK(count_outlier_days(series_of({0, 9, 100, 3}), 0, kNoUpperBound) == 0);
    CHECK(count_outlier_days(series_of({1, 1, 1, 1, 1, 1, 1, 1, 1, 7}), 2, 5) == 10);
}

TEST_CASE("daily_admissions zero-fills and filters") {
    Day d = Day::parse("2020-08-03");
    std::vector<AdmissionRecord> recs{{d, "PICUs", true},  {d, "PICUs", true},
                                      {d, "PICUs", true},  {d, "PICUs", false},
                                      {d, "PCUs", true},   {d + 1, "PICUs", true},
                                      {d - 1, "PICUs", true}};
    auto one = daily_admissions(recs, "PICUs", true, DateWindow{d, d});
    CHECK(one.counts == std::vector<std::int32_t>{3});
    auto all = daily_admissions(recs, "PICUs", false, DateWindow{d, d});
    CHECK(all.counts == std::vector<std::int32_t>{4});
    auto empty = daily_admissions(recs, "PICUs", true, DateWindow{d + 10, d + 16});
    CHECK(empty.size() == 7);
    CHECK(std::all_of(empty.counts.begin(), empty.counts.end(), [](auto c) { return c == 0; }));
    auto pcu = daily_admissions(recs, "PCUs", true, DateWindow{d - 1, d + 1});
    CHECK(pcu.counts == std::vector<std::int32_t>{0, 1, 0});
}

TEST_CASE("weekday_split") {
    auto fortnight = series_of(std::vector<std::int32_t>(14, 1));
    auto parts = weekday_split(fortnight);
    for (const auto& p : parts) CHECK(p.size() == 2);
    CHECK(parts[0].days[0] == kMon);

    auto weekend = series_of({4, 4}, Day::parse("2024-01-06"));
    for (const auto& p : weekday_split(weekend)) CHECK(p.empty());

    std::mt19937_64 rng(1);
    std::vector<std::int32_t> v(97);
    for (auto& x : v) x = static_cast<std::int32_t>(rng() % 8);
    auto s = series_of(v, Day::parse("2023-03-15"));
    std::int64_t weekday_total = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!s.days[i].is_weekend()) weekday_total += s.counts[i];
    std::int64_t split_total = 0;
    for (const auto& p : weekday_split(s))
        split_total += std::accumulate(p.counts.begin(), p.counts.end(), std::int64_t{0});
    CHECK(split_total == weekday_total);
}

TEST_CASE("autocorrelation on periodic and patterned weekday series") {
    std::vector<std::int32_t> periodic;
    for (int w = 0; w < 20; ++w)
        for (int x : {3, 1, 4, 1, 5}) periodic.push_back(x);
    auto acf = autocorrelation(weekday_series(periodic), 15);
    REQUIRE(acf.size() == 15);
    CHECK(std::abs(*acf[4] - 1.0) < 1e-9);
    CHECK(std::abs(*acf[9] - 1.0) < 1e-9);
    CHECK(std::abs(*acf[14] - 1.0) < 1e-9);
    CHECK(*acf[0] < 0.5);

    // Weekend days in the input are skipped.
    auto calendar = series_of(std::vector<std::int32_t>(70, 0));
    for (std::size_t i = 0; i < calendar.size(); ++i) {
        const auto w = calendar.days[i].iso_weekday_index();
        calendar.counts[i] = w >= 5 ? 50 : periodic[w];
    }
    CHECK(std::abs(*autocorrelation(calendar, 5)[4] - 1.0) < 1e-9);
    CHECK_THROWS_AS(autocorrelation(series_of({1, 2, 3}), 5), SeriesTooShort);
    auto constant = autocorrelation(weekday_series(std::vector<std::int32_t>(30, 2)), 5);
    for (const auto& r : constant) CHECK_FALSE(r);

    // Weekly block pattern plus noise: peaks at multiples of five.
    std::mt19937_64 rng(10);
    std::vector<std::int32_t> noisy;
    const int pattern[5] = {6, 2, 3, 7, 1};
    for (int w = 0; w < 60; ++w)
        for (int k = 0; k < 5; ++k)
            noisy.push_back(pattern[k] + static_cast<std::int32_t>(rng() % 3));
    auto r = autocorrelation(weekday_series(noisy), 16);
    for (int lag : {5, 10, 15}) {
        CHECK(*r[lag - 1] > *r[lag - 2]);
        CHECK(*r[lag - 1] > *r[lag]);
    }
}

TEST_CASE("reschedule_histogram") {
    std::vector<sim::SimRecord> recs(5);
    for (int i = 0; i < 5; ++i) {
        recs[i].delta_days = i - 2;
        recs[i].rescheduled = true;
    }
    auto h = reschedule_histogram(recs, 1);
    CHECK(h.bins.size() == 5);
    for (const auto& [edge, c] : h.bins) CHECK(c == 1);

    auto wide = reschedule_histogram(recs, 2);
    CHECK(wide.bins.at(-2) == 2);
    CHECK(wide.bins.at(0) == 2);
    CHECK(wide.bins.at(2) == 1);

    std::vector<sim::SimRecord> zeros(4);
    zeros[0].rescheduled = true;
    CHECK(reschedule_histogram(zeros, 1).total() == 1);
    auto all = reschedule_histogram(zeros, 1, true);
    CHECK(all.bins.size() == 1);
    CHECK(all.total() == 4);
}

TEST_CASE("bootstrap: no-change null is never rejected") {
    auto s = series_of(std::vector<std::int32_t>(40, 3));
    auto r = bootstrap_test(s, s, 0.25, 5000, 1);
    CHECK(r.p_value == 1.0);
    CHECK(r.observed_change == 0.0);
    auto zero_delta = bootstrap_test(s, s, 0.0, 2000, 9);
    CHECK(zero_delta.p_value == 1.0);
}

TEST_CASE("bootstrap: clear drop is rejected with delta 0") {
    std::vector<std::int32_t> before(70, 1);
    before.insert(before.end(), 30, 5);
    std::vector<std::int32_t> after(100, 3);
    auto r = bootstrap_test(series_of(before), series_of(after), 0.0, kDeskBootstrapSamples, 2021);
    CHECK(r.observed_change == doctest::Approx(-0.8));
    CHECK(r.p_value < 0.01);
    CHECK(r.m == kDeskBootstrapSamples);
}

TEST_CASE("bootstrap is reproducible and independent of thread count") {
    std::mt19937_64 rng(3);
    std::vector<std::int32_t> a(120), b(110);
    for (auto& x : a) x = 1 + static_cast<std::int32_t>(rng() % 6);
    for (auto& x : b) x = 1 + static_cast<std::int32_t>(rng() % 4);
    auto one = bootstrap_test(series_of(a), series_of(b), 0.1, 8000, 77, ChangeKind::Relative, 1);
    auto four = bootstrap_test(series_of(a), series_of(b), 0.1, 8000, 77, ChangeKind::Relative, 4);
    auto again = bootstrap_test(series_of(a), series_of(b), 0.1, 8000, 77);
    CHECK(one.p_value == four.p_value);
    CHECK(one.p_value == again.p_value);
    auto other_seed = bootstrap_test(series_of(a), series_of(b), 0.1, 8000, 78);
    CHECK(other_seed.p_value != doctest::Approx(-1.0));

    // Larger delta widens the null region, so p cannot shrink.
    double prev = -1;
    for (double delta : {0.0, 0.05, 0.1, 0.25, 0.5}) {
        auto r = bootstrap_test(series_of(a), series_of(b), delta, 4000, 5);
        CHECK(r.p_value >= prev);
        prev = r.p_value;
    }
    auto abs = bootstrap_test(series_of(a), series_of(b), 0.5, 4000, 5, ChangeKind::Absolute);
    CHECK(abs.kind == ChangeKind::Absolute);
    CHECK(abs.p_value >= 0.0);
    CHECK(abs.p_value <= 1.0);
}

TEST_CASE("bootstrap errors") {
    auto ok = series_of({1, 2, 3});
    CHECK_THROWS_AS(bootstrap_test(DailySeries{}, ok, 0.1, 10, 1), EmptySeries);
    CHECK_THROWS_AS(bootstrap_test(series_of({0, 0, 1}), ok, 0.1, 10, 1), ZeroMedian);
    CHECK_THROWS_AS(bootstrap_test(ok, ok, -0.1, 10, 1), ValidationError);
    CHECK_THROWS_AS(bootstrap_test(ok, ok, 0.1, 0, 1), ValidationError);
}

TEST_CASE("bounded random draws stay in range and cover it") {
    SplitMix64 rng(substream_seed(1, 2));
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) {
        auto v = rng.below(7);
        REQUIRE(v < 7);
        ++seen[v];
    }
    for (int c : seen) CHECK(c > 800);
    CHECK(substream_seed(1, 2) != substream_seed(1, 3));
    CHECK(substream_seed(1, 2) != substream_seed(2, 2));
}
