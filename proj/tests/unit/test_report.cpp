#include "beds/core/errors.hpp"
#include "beds/report/report.hpp"
#include "beds/sim/simulator.hpp"

#include <doctest.h>

#include <sstream>

using namespace beds;

namespace {

sim::SimRecord rec(const std::string& csn, const char* orig, const char* simd, const char* unit,
                   bool elective, bool resched) {
    sim::SimRecord r;
    r.primary_csn = csn;
    r.original_day = Day::parse(orig);
    r.simulated_day = Day::parse(simd);
    r.delta_days = r.simulated_day - r.original_day;
    r.unit = unit;
    r.elective = elective;
    r.rescheduled = resched;
    return r;
}

std::vector<sim::SimRecord> sample() {
    // 2024-01-01 is a Monday.
    return {rec("1", "2024-01-01", "2024-01-03", "PICUs", true, true),
            rec("2", "2024-01-01", "2024-01-01", "PICUs", true, false),
            rec("3", "2024-01-02", "2024-01-02", "PICUs", false, false),
            rec("4", "2024-01-04", "2024-01-10", "PICUs", true, true),
            rec("5", "2024-01-05", "2024-01-05", "PCUs", true, false),
            rec("6", "2024-01-08", "2024-01-08", "PICUs", true, false)};
}

}  // namespace

TEST_CASE("records csv round trip") {
    auto in = sample();
    std::stringstream ss;
    sim::write_records_csv(ss, in);
    auto out = report::read_records_csv(ss);
    REQUIRE(out.size() == in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        CHECK(out[i].primary_csn == in[i].primary_csn);
        CHECK(out[i].original_day == in[i].original_day);
        CHECK(out[i].simulated_day == in[i].simulated_day);
        CHECK(out[i].delta_days == in[i].delta_days);
        CHECK(out[i].unit == in[i].unit);
        CHECK(out[i].elective == in[i].elective);
        CHECK(out[i].rescheduled == in[i].rescheduled);
    }
    std::stringstream bad("csn,original_day\n");
    CHECK_THROWS_AS(report::read_records_csv(bad), MalformedHeader);
}

TEST_CASE("period and bootstrap parsing") {
    auto p = report::parse_period("pre=2019-08-01:2020-03-31");
    CHECK(p.label == "pre");
    CHECK(p.range.start == Day::parse("2019-08-01"));
    CHECK(p.range.end == Day::parse("2020-03-31"));
    CHECK(report::parse_period("2019-08-01:2019-08-02").label == "2019-08-01..2019-08-02");
    CHECK_THROWS_AS(report::parse_period("2019-08-01"), ValidationError);
    CHECK_THROWS_AS(report::parse_period("x=2019-13-01:2019-08-02"), ValidationError);

    auto b = report::parse_bootstrap("0.1,500,7");
    CHECK(b.delta == doctest::Approx(0.1));
    CHECK(b.m == 500);
    CHECK(b.seed == 7);
    CHECK_THROWS_AS(report::parse_bootstrap("0.1,500"), ValidationError);
    CHECK_THROWS_AS(report::parse_bootstrap("a,b,c"), ValidationError);
}

TEST_CASE("report summaries follow the chosen day column and filter") {
    auto records = sample();
    report::ReportOptions o;
    o.unit = "PICUs";
    o.periods = {report::parse_period("w=2024-01-01:2024-01-10")};
    o.outliers = std::pair{1, 1};
    auto r = report::build_report(records, o);
    const auto& s = r.body["periods"][0]["summary"];
    CHECK(s["n_days"] == 10);
    // Elective PICUs by simulated day: 01-01, 01-03, 01-08, 01-10.
    CHECK(s["mean"].get<double>() == doctest::Approx(0.4));
    CHECK(r.body["periods"][0]["outlier_days"] == 6);

    o.day_column = report::DayColumn::Original;
    o.elective_only = false;
    auto r2 = report::build_report(records, o);
    // All PICUs by original day: 01-01 x2, 01-02, 01-04, 01-08.
    CHECK(r2.body["periods"][0]["summary"]["mean"].get<double>() == doctest::Approx(0.5));
    CHECK(r2.series[0].counts[0] == 2);
}

TEST_CASE("report weekday split, bootstrap, acf and histogram") {
    std::vector<sim::SimRecord> records;
    int id = 0;
    for (Day d = Day::parse("2024-01-01"); d <= Day::parse("2024-06-30"); ++d) {
        if (d.is_weekend()) continue;
        int n = d < Day::parse("2024-04-01") ? 1 + (id % 4) : 2;
        for (int k = 0; k < n; ++k)
            records.push_back(rec(std::to_string(id++), d.iso().c_str(), d.iso().c_str(), "PICUs", true,
                                  k == 0));
    }
    report::ReportOptions o;
    o.periods = {report::parse_period("a=2024-01-01:2024-03-31"),
                 report::parse_period("b=2024-04-01:2024-06-30")};
    o.weekdays = true;
    o.bootstrap = report::BootstrapSpec{0.0, 2000, 3};
    o.acf_lags = 3;
    o.histogram_width = 7;
    auto r = report::build_report(records, o);
    CHECK(r.body["periods"][0]["weekdays"].size() == 5);
    CHECK(r.body["periods"][0]["autocorrelation"].size() == 3);
    auto p = r.body["bootstrap"]["overall"]["p_value"].get<double>();
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(r.body["bootstrap"]["weekdays"].size() == 5);
    REQUIRE(r.histogram);
    CHECK(r.histogram->bins.at(0) == r.histogram->total());

    std::stringstream csv;
    report::write_report_csv(csv, r);
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("period,start,end,weekday", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 12);

    std::stringstream svg;
    report::write_series_svg(svg, r.series, "a & b");
    CHECK(svg.str().find("<svg") == 0);
    CHECK(svg.str().find("a &amp; b") != std::string::npos);
    std::stringstream hs;
    report::write_histogram_svg(hs, *r.histogram, "h");
    CHECK(hs.str().find("<rect") != std::string::npos);

    o.periods.pop_back();
    CHECK_THROWS_AS(report::build_report(records, o), ValidationError);
}

TEST_CASE("default period spans the unit's records") {
    report::ReportOptions o;
    auto r = report::build_report(sample(), o);
    CHECK(r.body["periods"][0]["start"] == "2024-01-01");
    CHECK(r.body["periods"][0]["end"] == "2024-01-10");
    o.unit = "NOPE";
    CHECK_THROWS_AS(report::build_report(sample(), o), ValidationError);
}
