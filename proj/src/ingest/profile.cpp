#include "beds/ingest/profile.hpp"

#include "beds/core/errors.hpp"
#include "beds/core/json_codec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace beds::ingest {

std::string to_string(PatientClass c) {
    switch (c) {
        case PatientClass::SurgicalOutpatient: return "Surgical Outpatient";
        case PatientClass::SurgicalAdmit: return "Surgical Admit";
        case PatientClass::SurgicalInpatient: return "Surgical Inpatient";
        case PatientClass::MedicalInpatient: return "Medical Inpatient";
    }
    return "Medical Inpatient";
}

PatientClass patient_class_from_string(const std::string& s) {
    for (auto c : {PatientClass::SurgicalOutpatient, PatientClass::SurgicalAdmit,
                   PatientClass::SurgicalInpatient, PatientClass::MedicalInpatient})
        if (to_string(c) == s) return c;
    throw ParseError("unknown patient class '" + s + "'");
}

PatientClass map_patient_class(const std::string& raw, bool has_surgery) {
    if (!has_surgery) return PatientClass::MedicalInpatient;
    if (raw == "Outpatient Surgery" || raw == "Surgical Outpatient")
        return PatientClass::SurgicalOutpatient;
    if (raw == "Surgery Admit" || raw == "Surgical Admit") return PatientClass::SurgicalAdmit;
    return PatientClass::SurgicalInpatient;
}

std::optional<Day> PatientProfile::first_surgery_day() const {
    if (in_or_times.empty()) return std::nullopt;
    return Day::of(in_or_times.front());
}

std::int64_t lead_days(const PatientProfile& p) { return p.admission_day() - p.arrival_day(); }

bool classify_elective(const PatientProfile& p) {
    return p.patient_class == PatientClass::SurgicalOutpatient ||
           p.patient_class == PatientClass::SurgicalAdmit || lead_days(p) >= 1;
}

std::optional<DateWindow> available_window(Day d1, Day d0, Day d2, double alpha) {
    if (d2 < d1)
        throw NegativeLead("admission day " + d2.iso() + " precedes arrival day " + d1.iso());
    if (!std::isfinite(alpha) || alpha < 0) throw ValidationError("alpha must be a non-negative number");
    const auto k = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(d2 - d1)));
    const Day start = std::max(d1 + 1, d0 - k);
    const Day end = d0 + k;
    if (end < start) return std::nullopt;
    return DateWindow{start, end};
}

std::vector<Timestamp> unit_entries(const PatientProfile& p) {
    std::vector<Timestamp> out;
    out.reserve(p.unit_list.size());
    Timestamp t = p.admission_time;
    for (std::size_t i = 0; i < p.unit_list.size(); ++i) {
        out.push_back(t);
        if (i < p.los_list.size()) t += p.los_list[i];
    }
    return out;
}

std::optional<std::size_t> first_post_or_index(const PatientProfile& p) {
    if (p.or_positions.empty()) return std::nullopt;
    for (std::size_t i = p.or_positions.front() + 1; i < p.unit_list.size(); ++i)
        if (std::find(p.or_positions.begin(), p.or_positions.end(), i) == p.or_positions.end())
            return i;
    return std::nullopt;
}

AdmissionPoint admission_point(const PatientProfile& p) {
    auto entries = unit_entries(p);
    if (!p.is_surgical()) return {p.unit_list.front(), Day::of(entries.front()), 0};
    if (auto i = first_post_or_index(p)) return {p.unit_list[*i], Day::of(entries[*i]), *i};
    return {kNoUnit, Day::of(p.in_or_times.front()), p.unit_list.size()};
}

IngestOptions IngestOptions::for_sim_start(Day sim_start, std::int64_t warmup_days) {
    IngestOptions o;
    o.sim_start = sim_start;
    o.warmup_start = sim_start - warmup_days;
    return o;
}

std::int64_t CleaningReport::excluded() const {
    return malformed_rows + missing_in_out_room + duplicates + inconsecutive + overnight +
           inconsistent + out_of_scope + before_warmup;
}

nlohmann::json to_json(const CleaningReport& r) {
    return {{"input_patients", r.input_patients},
            {"profiles", r.profiles},
            {"rejected_rows", r.rejected_rows},
            {"excluded",
             {{"malformed_rows", r.malformed_rows},
              {"missing_in_out_room", r.missing_in_out_room},
              {"duplicates", r.duplicates},
              {"inconsecutive", r.inconsecutive},
              {"overnight", r.overnight},
              {"inconsistent", r.inconsistent},
              {"out_of_scope", r.out_of_scope},
              {"before_warmup", r.before_warmup}}},
            {"excluded_total", r.excluded()},
            {"balanced", r.balanced()}};
}

namespace {

enum class Outcome {
    Ok,
    MalformedRows,
    MissingInOut,
    Duplicate,
    Inconsecutive,
    Overnight,
    Inconsistent,
    OutOfScope,
    BeforeWarmup
};

struct Segment {
    UnitId unit;
    Timestamp entry;
    bool is_or = false;
    Timestamp out_of_room{};          // surgeries
    Day first_night;                  // stays
    std::int64_t nights = 0;          // stays
    const CensusRow* last = nullptr;  // stays
};

struct Item {
    Timestamp t;
    const ProcedureRow* proc = nullptr;
    const CensusRow* night = nullptr;
};

Outcome build_one(const PatientId& csn, std::vector<const CensusRow*> nights,
                  std::vector<const ProcedureRow*> procs, const IngestOptions& opts,
                  PatientProfile& out) {
    std::stable_sort(nights.begin(), nights.end(), [](auto* a, auto* b) {
        return a->effective_datetime < b->effective_datetime;
    });
    std::stable_sort(procs.begin(), procs.end(), [](auto* a, auto* b) {
        return a->patient_in_room < b->patient_in_room;
    });

    for (std::size_t i = 1; i < nights.size(); ++i)
        if (Day::of(nights[i]->effective_datetime) == Day::of(nights[i - 1]->effective_datetime))
            return Outcome::Duplicate;
    for (std::size_t i = 1; i < nights.size(); ++i)
        if (Day::of(nights[i]->effective_datetime) - Day::of(nights[i - 1]->effective_datetime) != 1)
            return Outcome::Inconsecutive;
    for (auto* p : procs)
        if (Day::of(p->patient_in_room) != Day::of(p->patient_out_of_room)) return Outcome::Overnight;

    std::vector<Item> items;
    for (auto* p : procs) items.push_back({p->patient_in_room, p, nullptr});
    for (auto* n : nights) items.push_back({n->effective_datetime, nullptr, n});
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.proc && !b.proc;
    });

    auto label = [&](const UnitId& dept) {
        return opts.scope_units.count(dept) ? dept : opts.out_of_scope_label;
    };

    std::vector<Segment> segs;
    std::vector<std::size_t> or_positions;
    for (const auto& it : items) {
        if (it.proc) {
            Segment s;
            s.unit = it.proc->location;
            s.entry = it.proc->patient_in_room;
            s.is_or = true;
            s.out_of_room = it.proc->patient_out_of_room;
            or_positions.push_back(segs.size());
            segs.push_back(std::move(s));
            continue;
        }
        const Day night = Day::of(it.night->effective_datetime);
        UnitId unit = label(it.night->dept);
        if (!segs.empty() && !segs.back().is_or && segs.back().unit == unit) {
            ++segs.back().nights;
            segs.back().last = it.night;
            continue;
        }
        Segment s;
        s.unit = std::move(unit);
        s.first_night = night;
        s.nights = 1;
        s.last = it.night;
        if (segs.empty())
            s.entry = it.night->admission_datetime;
        else if (segs.back().is_or)
            s.entry = segs.back().out_of_room;
        else
            s.entry = night.at(12);
        segs.push_back(std::move(s));
    }

    const bool any_scoped =
        std::any_of(segs.begin(), segs.end(),
                    [&](const Segment& s) { return s.is_or || s.unit != opts.out_of_scope_label; });
    if (!any_scoped) return Outcome::OutOfScope;

    std::vector<Duration> los;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        Timestamp exit;
        if (i + 1 < segs.size()) {
            exit = segs[i + 1].entry;
        } else if (segs[i].is_or) {
            exit = segs[i].out_of_room;
        } else if (segs[i].last->discharge_datetime && *segs[i].last->discharge_datetime > segs[i].entry) {
            exit = *segs[i].last->discharge_datetime;
        } else {
            exit = segs[i].entry + std::chrono::days{segs[i].nights};
        }
        if (exit <= segs[i].entry) return Outcome::Inconsistent;
        los.push_back(exit - segs[i].entry);
    }

    PatientProfile p;
    p.primary_csn = csn;
    p.admission_time = segs.front().entry;
    for (const auto& s : segs) p.unit_list.push_back(s.unit);
    p.los_list = std::move(los);
    p.or_positions = std::move(or_positions);
    for (auto* pr : procs) {
        p.in_or_times.push_back(pr->patient_in_room);
        const auto secs = (pr->patient_out_of_room - pr->patient_in_room).count();
        p.or_durations.push_back(Hours::from_centi(std::llround(static_cast<double>(secs) / 36.0)));
    }
    if (procs.empty()) {
        p.patient_class = PatientClass::MedicalInpatient;
        p.arrival_time = p.admission_time;
    } else {
        p.patient_class_raw = procs.front()->patient_class;
        p.patient_class = map_patient_class(p.patient_class_raw, true);
        p.primary_surgeon_id = procs.front()->primary_surgeon_id;
        p.arrival_time = std::min(procs.front()->scheduled_on, p.admission_time);
        p.available_window = available_window(p.arrival_day(), *p.first_surgery_day(),
                                              p.admission_day(), opts.alpha);
    }
    if (p.arrival_day() < opts.warmup_start) return Outcome::BeforeWarmup;
    out = std::move(p);
    return Outcome::Ok;
}

bool is_in_out_reject(const Reject& r) {
    return r.table == "procedure" &&
           (r.reason == std::string("missing ") + columns::kInRoom ||
            r.reason == std::string("missing ") + columns::kOutOfRoom);
}

}  // namespace

BuildResult build_profiles(const std::vector<CensusRow>& census,
                           const std::vector<ProcedureRow>& procedures,
                           const std::vector<Reject>& rejects, const IngestOptions& opts) {
    std::map<PatientId, std::vector<const CensusRow*>> nights;
    std::map<PatientId, std::vector<const ProcedureRow*>> procs;
    std::map<PatientId, Outcome> reject_outcome;
    for (const auto& r : census) nights[r.primary_csn].push_back(&r);
    for (const auto& r : procedures) procs[r.primary_csn].push_back(&r);
    for (const auto& r : rejects) {
        if (r.primary_csn.empty() || r.table == "availability") continue;
        auto& o = reject_outcome[r.primary_csn];
        if (is_in_out_reject(r))
            o = Outcome::MissingInOut;
        else if (o != Outcome::MissingInOut)
            o = Outcome::MalformedRows;
    }

    std::set<PatientId> patients;
    for (const auto& [k, v] : nights) patients.insert(k);
    for (const auto& [k, v] : procs) patients.insert(k);
    for (const auto& [k, v] : reject_outcome) patients.insert(k);

    BuildResult res;
    auto& rep = res.report;
    rep.input_patients = static_cast<std::int64_t>(patients.size());
    rep.rejected_rows = static_cast<std::int64_t>(rejects.size());
    for (const auto& csn : patients) {
        Outcome o;
        PatientProfile prof;
        if (auto it = reject_outcome.find(csn); it != reject_outcome.end()) {
            o = it->second;
        } else {
            auto n = nights.find(csn);
            auto p = procs.find(csn);
            o = build_one(csn, n == nights.end() ? std::vector<const CensusRow*>{} : n->second,
                          p == procs.end() ? std::vector<const ProcedureRow*>{} : p->second, opts,
                          prof);
        }
        switch (o) {
            case Outcome::Ok: res.profiles.push_back(std::move(prof)); break;
            case Outcome::MalformedRows: ++rep.malformed_rows; break;
            case Outcome::MissingInOut: ++rep.missing_in_out_room; break;
            case Outcome::Duplicate: ++rep.duplicates; break;
            case Outcome::Inconsecutive: ++rep.inconsecutive; break;
            case Outcome::Overnight: ++rep.overnight; break;
            case Outcome::Inconsistent: ++rep.inconsistent; break;
            case Outcome::OutOfScope: ++rep.out_of_scope; break;
            case Outcome::BeforeWarmup: ++rep.before_warmup; break;
        }
    }
    std::sort(res.profiles.begin(), res.profiles.end(), [](const auto& a, const auto& b) {
        if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
        return a.primary_csn < b.primary_csn;
    });
    rep.profiles = static_cast<std::int64_t>(res.profiles.size());
    return res;
}

std::vector<metrics::AdmissionRecord> recorded_admissions(
    const std::vector<PatientProfile>& profiles) {
    std::vector<metrics::AdmissionRecord> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles) {
        auto a = admission_point(p);
        out.push_back({a.day, a.unit, classify_elective(p)});
    }
    return out;
}

ScheduleState initial_state(const std::vector<PatientProfile>& profiles,
                            const std::vector<SurgeonAvailabilityRow>& availability) {
    ScheduleState s;
    for (const auto& r : availability) s.add_hours(r.date, r.primary_surgeon_id, r.available_hours);
    for (const auto& p : profiles) {
        if (!p.is_surgical()) continue;
        auto a = admission_point(p);
        s.set_admissions(a.day, a.unit, s.admissions(a.day, a.unit) + 1);
        const Day d = *p.first_surgery_day();
        const Hours left = s.hours(d, p.primary_surgeon_id) - p.or_durations.front();
        s.set_hours(d, p.primary_surgeon_id, std::max(left, Hours{}));
    }
    return s;
}

void to_json(nlohmann::json& j, const PatientProfile& p) {
    std::vector<std::string> in_or;
    for (auto t : p.in_or_times) in_or.push_back(format_timestamp(t));
    std::vector<std::int64_t> los;
    for (auto d : p.los_list) los.push_back(d.count());
    j = {{"primary_csn", p.primary_csn},
         {"patient_class", to_string(p.patient_class)},
         {"patient_class_raw", p.patient_class_raw},
         {"arrival_time", format_timestamp(p.arrival_time)},
         {"admission_time", format_timestamp(p.admission_time)},
         {"available_window", p.available_window ? nlohmann::json(*p.available_window) : nlohmann::json()},
         {"unit_list", p.unit_list},
         {"los_seconds", los},
         {"in_or_times", in_or},
         {"or_durations", p.or_durations},
         {"or_positions", p.or_positions},
         {"primary_surgeon_id", p.primary_surgeon_id}};
}

namespace {

Timestamp ts_field(const nlohmann::json& j, const char* key) {
    auto text = j.at(key).get<std::string>();
    auto t = try_parse_timestamp(text);
    if (!t) throw ParseError(std::string("bad timestamp in ") + key + ": " + text);
    return *t;
}

}  // namespace

void from_json(const nlohmann::json& j, PatientProfile& p) {
    p = PatientProfile{};
    p.primary_csn = j.at("primary_csn").get<std::string>();
    p.patient_class = patient_class_from_string(j.at("patient_class").get<std::string>());
    p.patient_class_raw = j.value("patient_class_raw", std::string{});
    p.arrival_time = ts_field(j, "arrival_time");
    p.admission_time = ts_field(j, "admission_time");
    if (j.contains("available_window") && !j.at("available_window").is_null())
        p.available_window = j.at("available_window").get<DateWindow>();
    p.unit_list = j.at("unit_list").get<std::vector<UnitId>>();
    for (auto s : j.at("los_seconds").get<std::vector<std::int64_t>>()) p.los_list.emplace_back(s);
    for (const auto& t : j.at("in_or_times")) {
        auto parsed = try_parse_timestamp(t.get<std::string>());
        if (!parsed) throw ParseError("bad timestamp in in_or_times");
        p.in_or_times.push_back(*parsed);
    }
    p.or_durations = j.value("or_durations", std::vector<Hours>{});
    p.or_positions = j.value("or_positions", std::vector<std::size_t>{});
    p.primary_surgeon_id = j.value("primary_surgeon_id", std::string{});
    if (p.unit_list.size() != p.los_list.size())
        throw ParseError("unit_list and los_seconds differ in length for " + p.primary_csn);
    if (p.or_durations.size() != p.in_or_times.size() || p.or_positions.size() != p.in_or_times.size())
        throw ParseError("surgery lists differ in length for " + p.primary_csn);
}

void write_profiles(std::ostream& out, const std::vector<PatientProfile>& profiles) {
    for (const auto& p : profiles) out << nlohmann::json(p).dump() << '\n';
}

std::vector<PatientProfile> read_profiles(std::istream& in) {
    std::vector<PatientProfile> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line).get<PatientProfile>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("profile line " + std::to_string(n) + ": " + e.what());
        } catch (const ParseError& e) {
            throw ParseError("profile line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace beds::ingest
