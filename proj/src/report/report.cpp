#include "beds/report/report.hpp"

#include "beds/core/errors.hpp"
#include "beds/core/json_codec.hpp"
#include "beds/ingest/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace beds::report {

using nlohmann::json;

std::vector<sim::SimRecord> read_records_csv(std::istream& in) {
    ingest::CsvReader reader(in);
    auto header = reader.next();
    if (!header) throw ParseError("empty records file");
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < header->size(); ++i) idx[(*header)[i]] = i;
    for (const char* col : {"primary_csn", "original_day", "simulated_day", "unit"})
        if (!idx.count(col)) throw MalformedHeader("records", col);
    auto field = [&](const ingest::CsvRecord& r, const char* col) -> std::string {
        auto it = idx.find(col);
        return it == idx.end() || it->second >= r.size() ? std::string{} : r[it->second];
    };
    std::vector<sim::SimRecord> out;
    while (auto rec = reader.next()) {
        if (rec->size() == 1 && rec->front().empty()) continue;
        sim::SimRecord r;
        r.primary_csn = field(*rec, "primary_csn");
        auto o = Day::try_parse(field(*rec, "original_day"));
        auto s = Day::try_parse(field(*rec, "simulated_day"));
        if (!o || !s) throw ParseError("bad day on records line " + std::to_string(reader.line()));
        r.original_day = *o;
        r.simulated_day = *s;
        r.delta_days = r.simulated_day - r.original_day;
        r.unit = field(*rec, "unit");
        r.elective = field(*rec, "elective") == "1";
        r.rescheduled = field(*rec, "rescheduled") == "1";
        out.push_back(std::move(r));
    }
    return out;
}

Period parse_period(const std::string& text) {
    Period p;
    std::string rest = text;
    if (auto eq = rest.find('='); eq != std::string::npos) {
        p.label = rest.substr(0, eq);
        rest = rest.substr(eq + 1);
    }
    auto colon = rest.find(':');
    if (colon == std::string::npos) throw ValidationError("period must be START:END, got '" + text + "'");
    auto s = Day::try_parse(rest.substr(0, colon));
    auto e = Day::try_parse(rest.substr(colon + 1));
    if (!s || !e) throw ValidationError("bad dates in period '" + text + "'");
    p.range = DateWindow{*s, *e};
    if (p.label.empty()) p.label = s->iso() + ".." + e->iso();
    return p;
}

BootstrapSpec parse_bootstrap(const std::string& text) {
    BootstrapSpec b;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 3) throw ValidationError("bootstrap must be delta,m,seed");
    try {
        b.delta = std::stod(parts[0]);
        b.m = std::stoll(parts[1]);
        b.seed = std::stoull(parts[2]);
    } catch (const std::exception&) {
        throw ValidationError("bootstrap must be delta,m,seed");
    }
    return b;
}

namespace {

json summary_json(const metrics::SummaryStats& s) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(); };
    return {{"n_days", s.n_days}, {"mean", s.mean},      {"coefficient_of_variation", opt(s.coefficient_of_variation)},
            {"median", s.median}, {"q90", s.q90},        {"qmra", opt(s.qmra)}};
}

json bootstrap_json(const metrics::DailySeries& before, const metrics::DailySeries& after,
                    const BootstrapSpec& spec) {
    try {
        auto r = metrics::bootstrap_test(before, after, spec.delta, spec.m, spec.seed, spec.kind);
        return {{"observed_change", r.observed_change},
                {"p_value", r.p_value},
                {"undefined_replicates", r.undefined_replicates}};
    } catch (const Error& e) {
        return {{"error", e.what()}};
    }
}

}  // namespace

Report build_report(const std::vector<sim::SimRecord>& records, const ReportOptions& opts) {
    if (opts.bootstrap && opts.periods.size() != 2)
        throw ValidationError("the bootstrap test compares exactly two periods");
    if (opts.acf_lags && *opts.acf_lags < 1) throw ValidationError("acf lags must be at least 1");

    std::vector<metrics::AdmissionRecord> adm;
    adm.reserve(records.size());
    for (const auto& r : records)
        adm.push_back({opts.day_column == DayColumn::Simulated ? r.simulated_day : r.original_day,
                       r.unit, r.elective});

    std::vector<Period> periods = opts.periods;
    if (periods.empty()) {
        std::optional<Day> lo, hi;
        for (const auto& a : adm) {
            if (a.unit != opts.unit || (opts.elective_only && !a.elective)) continue;
            lo = lo ? std::min(*lo, a.day) : a.day;
            hi = hi ? std::max(*hi, a.day) : a.day;
        }
        if (!lo) throw ValidationError("no admissions for unit " + opts.unit);
        periods.push_back({"all", DateWindow{*lo, *hi}});
    }

    Report rep;
    json jp = json::array();
    for (const auto& p : periods) {
        auto s = metrics::daily_admissions(adm, opts.unit, opts.elective_only, p.range);
        json e{{"label", p.label},
               {"start", p.range.start},
               {"end", p.range.end},
               {"summary", summary_json(metrics::summarize(s, opts.deviation))}};
        if (opts.outliers)
            e["outlier_days"] = metrics::count_outlier_days(s, opts.outliers->first, opts.outliers->second);
        if (opts.weekdays) {
            json wd = json::array();
            auto parts = metrics::weekday_split(s);
            for (std::size_t w = 0; w < parts.size(); ++w) {
                json row{{"weekday", metrics::kWeekdayNames[w]}};
                if (parts[w].empty()) {
                    row["summary"] = nullptr;
                } else {
                    row["summary"] = summary_json(metrics::summarize(parts[w], opts.deviation));
                    if (opts.outliers)
                        row["outlier_days"] = metrics::count_outlier_days(parts[w], opts.outliers->first,
                                                                          opts.outliers->second);
                }
                wd.push_back(std::move(row));
            }
            e["weekdays"] = std::move(wd);
        }
        if (opts.acf_lags) {
            try {
                json acf = json::array();
                for (const auto& v : metrics::autocorrelation(s, *opts.acf_lags))
                    acf.push_back(v ? json(*v) : json());
                e["autocorrelation"] = std::move(acf);
            } catch (const SeriesTooShort& ex) {
                e["autocorrelation"] = {{"error", ex.what()}};
            }
        }
        jp.push_back(std::move(e));
        rep.series.push_back(std::move(s));
    }

    rep.body = {{"unit", opts.unit},
                {"filter", opts.elective_only ? "elective" : "all"},
                {"day_column", opts.day_column == DayColumn::Simulated ? "simulated" : "original"},
                {"deviation", opts.deviation == metrics::Deviation::Population ? "population" : "sample"},
                {"periods", std::move(jp)}};
    if (opts.outliers) rep.body["outlier_bounds"] = {opts.outliers->first, opts.outliers->second};

    if (opts.bootstrap) {
        const auto& spec = *opts.bootstrap;
        json b{{"delta", spec.delta},
               {"m", spec.m},
               {"seed", spec.seed},
               {"kind", spec.kind == metrics::ChangeKind::Relative ? "relative" : "absolute"},
               {"overall", bootstrap_json(rep.series[0], rep.series[1], spec)}};
        if (opts.weekdays) {
            auto before = metrics::weekday_split(rep.series[0]);
            auto after = metrics::weekday_split(rep.series[1]);
            json wd = json::array();
            for (std::size_t w = 0; w < before.size(); ++w) {
                json row = bootstrap_json(before[w], after[w], spec);
                row["weekday"] = metrics::kWeekdayNames[w];
                wd.push_back(std::move(row));
            }
            b["weekdays"] = std::move(wd);
        }
        rep.body["bootstrap"] = std::move(b);
    }

    if (opts.histogram_width) {
        rep.histogram = metrics::reschedule_histogram(records, *opts.histogram_width);
        json bins = json::array();
        for (const auto& [edge, c] : rep.histogram->bins) bins.push_back({{"start", edge}, {"count", c}});
        rep.body["reschedule_histogram"] = {{"bin_width", *opts.histogram_width},
                                            {"total", rep.histogram->total()},
                                            {"bins", std::move(bins)}};
    }
    return rep;
}

namespace {

std::string num(const json& v) {
    if (v.is_null()) return "";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const Report& r) {
    ingest::write_csv_record(out, {"period", "start", "end", "weekday", "n_days", "mean",
                                   "coefficient_of_variation", "median", "q90", "qmra",
                                   "outlier_days", "p_value"});
    const json& b = r.body.contains("bootstrap") ? r.body["bootstrap"] : json();
    std::size_t pi = 0;
    for (const auto& p : r.body["periods"]) {
        auto row = [&](const std::string& weekday, const json& s, const json& outliers, const json& pv) {
            if (s.is_null()) return;
            ingest::write_csv_record(
                out, {p["label"], p["start"], p["end"], weekday, num(s["n_days"]), num(s["mean"]),
                      num(s["coefficient_of_variation"]), num(s["median"]), num(s["q90"]),
                      num(s["qmra"]), num(outliers), num(pv)});
        };
        const bool second = pi == 1;
        json overall_p = second && b.is_object() ? b["overall"].value("p_value", json()) : json();
        row("all", p["summary"], p.value("outlier_days", json()), overall_p);
        if (p.contains("weekdays")) {
            for (std::size_t w = 0; w < p["weekdays"].size(); ++w) {
                const auto& wd = p["weekdays"][w];
                json pv = second && b.is_object() && b.contains("weekdays")
                              ? b["weekdays"][w].value("p_value", json())
                              : json();
                row(wd["weekday"], wd["summary"], wd.value("outlier_days", json()), pv);
            }
        }
        ++pi;
    }
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string escape_xml(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

}  // namespace

void write_series_svg(std::ostream& out, const std::vector<metrics::DailySeries>& series,
                      const std::string& title) {
    const double w = 900, h = 320, left = 50, right = 20, top = 40, bottom = 40;
    std::size_t longest = 1;
    std::int32_t ymax = 1;
    for (const auto& s : series) {
        longest = std::max(longest, s.size());
        for (auto c : s.counts) ymax = std::max(ymax, c);
    }
    const double xs = (w - left - right) / static_cast<double>(std::max<std::size_t>(1, longest - 1));
    const double ys = (h - top - bottom) / ymax;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << escape_xml(title) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\""
        << h - bottom << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
        << "\" stroke=\"#333\"/>\n";
    for (int y = 0; y <= ymax; y += std::max(1, ymax / 5))
        out << "<text x=\"" << left - 8 << "\" y=\"" << h - bottom - y * ys + 4
            << "\" text-anchor=\"end\">" << y << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.size(); ++i)
            out << left + static_cast<double>(i) * xs << ',' << h - bottom - s.counts[i] * ys << ' ';
        out << "\"/>\n";
        if (!s.empty())
            out << "<text x=\"" << w - right - 200 << "\" y=\"" << top + 14 * static_cast<double>(k)
                << "\" fill=\"" << color << "\">" << s.days.front().iso() << " .. " << s.days.back().iso()
                << "</text>\n";
    }
    out << "</svg>\n";
}

void write_histogram_svg(std::ostream& out, const metrics::Histogram& hist, const std::string& title) {
    const double w = 900, h = 320, left = 50, right = 20, top = 40, bottom = 40;
    std::int64_t cmax = 1;
    for (const auto& [e, c] : hist.bins) cmax = std::max(cmax, c);
    const std::size_t nb = std::max<std::size_t>(1, hist.bins.size());
    const double bw = (w - left - right) / static_cast<double>(nb);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << escape_xml(title) << "</text>\n";
    std::size_t i = 0;
    for (const auto& [edge, c] : hist.bins) {
        const double bh = (h - top - bottom) * static_cast<double>(c) / static_cast<double>(cmax);
        const double x = left + static_cast<double>(i) * bw;
        out << "<rect x=\"" << x + 1 << "\" y=\"" << h - bottom - bh << "\" width=\"" << std::max(1.0, bw - 2)
            << "\" height=\"" << bh << "\" fill=\"#1f77b4\"><title>[" << edge << ", "
            << edge + hist.bin_width << "): " << c << "</title></rect>\n";
        if (nb <= 40 || i % (nb / 20 + 1) == 0)
            out << "<text x=\"" << x + bw / 2 << "\" y=\"" << h - bottom + 14 << "\" text-anchor=\"middle\">"
                << edge << "</text>\n";
        ++i;
    }
    out << "</svg>\n";
}

}  // namespace beds::report
