#include "beds/ingest/tables.hpp"

#include "beds/core/errors.hpp"
#include "beds/ingest/csv.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace beds::ingest {

namespace c = columns;

std::vector<std::string> census_header() {
    return {c::kCsn,       c::kDept,    c::kEffective, c::kAdmission,
            c::kDischarge, c::kService, c::kAdmitType, c::kAdmitSource};
}

std::vector<std::string> procedure_header() {
    return {c::kCsn,     c::kSurgeon,    c::kLocation,     c::kScheduledOn, c::kScheduledFor,
            c::kInRoom,  c::kOutOfRoom,  c::kPatientClass, c::kService,     c::kProcedureId};
}

std::vector<std::string> availability_header() {
    return {c::kDate, c::kSurgeon, c::kService, c::kAvailableHours};
}

namespace {

class Table {
public:
    Table(std::istream& in, std::string name, const std::vector<std::string>& required)
        : reader_(in), name_(std::move(name)) {
        auto header = reader_.next();
        if (!header) throw MalformedHeader(name_, required.front());
        header_ = *header;
        for (std::size_t i = 0; i < header_.size(); ++i) index_.emplace(header_[i], i);
        for (const auto& col : required)
            if (!index_.count(col)) throw MalformedHeader(name_, col);
        for (const auto& col : required) required_.push_back(index_.at(col));
    }

    bool next() {
        ++record_;
        auto rec = reader_.next();
        while (rec && rec->size() == 1 && rec->front().empty()) {
            ++record_;
            rec = reader_.next();
        }
        if (!rec) return false;
        row_ = std::move(*rec);
        return true;
    }

    std::size_t record() const { return record_; }
    bool width_ok() const { return row_.size() == header_.size(); }

    std::string get(const char* col) const {
        auto it = index_.find(col);
        if (it == index_.end() || it->second >= row_.size()) return {};
        return row_[it->second];
    }

    // First required column whose field is empty, if any.
    std::optional<std::string> missing_required() const {
        for (auto i : required_)
            if (i >= row_.size() || row_[i].empty()) return header_[i];
        return std::nullopt;
    }

    Reject reject(std::string reason) const {
        return Reject{name_, record_, get(c::kCsn), std::move(reason)};
    }

    Timestamp timestamp(const char* col) const {
        auto text = get(col);
        auto t = try_parse_timestamp(text);
        if (!t) throw UnparseableTimestamp(text, record_);
        return *t;
    }

    std::optional<Timestamp> optional_timestamp(const char* col) const {
        auto text = get(col);
        if (text.empty()) return std::nullopt;
        return timestamp(col);
    }

private:
    CsvReader reader_;
    std::string name_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> required_;
    CsvRecord row_;
    std::size_t record_ = 1;
};

}  // namespace

std::vector<CensusRow> parse_census(std::istream& in, std::vector<Reject>& rejects) {
    Table t(in, "census", {c::kCsn, c::kDept, c::kEffective, c::kAdmission});
    std::vector<CensusRow> rows;
    while (t.next()) {
        if (!t.width_ok()) {
            rejects.push_back(t.reject("wrong number of fields"));
            continue;
        }
        if (auto col = t.missing_required()) {
            rejects.push_back(t.reject("missing " + *col));
            continue;
        }
        CensusRow r;
        r.primary_csn = t.get(c::kCsn);
        r.dept = t.get(c::kDept);
        r.effective_datetime = t.timestamp(c::kEffective);
        r.admission_datetime = t.timestamp(c::kAdmission);
        r.discharge_datetime = t.optional_timestamp(c::kDischarge);
        r.service = t.get(c::kService);
        r.admit_type = t.get(c::kAdmitType);
        r.admit_source = t.get(c::kAdmitSource);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ProcedureRow> parse_procedures(std::istream& in, std::vector<Reject>& rejects) {
    Table t(in, "procedure",
            {c::kCsn, c::kSurgeon, c::kLocation, c::kScheduledOn, c::kScheduledFor, c::kInRoom,
             c::kOutOfRoom});
    std::vector<ProcedureRow> rows;
    while (t.next()) {
        if (!t.width_ok()) {
            rejects.push_back(t.reject("wrong number of fields"));
            continue;
        }
        if (auto col = t.missing_required()) {
            rejects.push_back(t.reject("missing " + *col));
            continue;
        }
        ProcedureRow r;
        r.primary_csn = t.get(c::kCsn);
        r.primary_surgeon_id = t.get(c::kSurgeon);
        r.location = t.get(c::kLocation);
        r.scheduled_on = t.timestamp(c::kScheduledOn);
        r.scheduled_for = t.timestamp(c::kScheduledFor);
        r.patient_in_room = t.timestamp(c::kInRoom);
        r.patient_out_of_room = t.timestamp(c::kOutOfRoom);
        r.patient_class = t.get(c::kPatientClass);
        r.service = t.get(c::kService);
        r.procedure_id = t.get(c::kProcedureId);
        if (r.patient_out_of_room < r.patient_in_room) {
            rejects.push_back(t.reject("Patient out of Room before Patient in Room"));
            continue;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SurgeonAvailabilityRow> parse_availability(std::istream& in,
                                                       std::vector<Reject>& rejects) {
    Table t(in, "availability", {c::kDate, c::kSurgeon, c::kService, c::kAvailableHours});
    std::vector<SurgeonAvailabilityRow> rows;
    while (t.next()) {
        if (!t.width_ok()) {
            rejects.push_back(t.reject("wrong number of fields"));
            continue;
        }
        if (auto col = t.missing_required()) {
            rejects.push_back(t.reject("missing " + *col));
            continue;
        }
        SurgeonAvailabilityRow r;
        auto date = t.get(c::kDate);
        if (auto d = Day::try_parse(date)) {
            r.date = *d;
        } else {
            r.date = Day::of(t.timestamp(c::kDate));
        }
        r.primary_surgeon_id = t.get(c::kSurgeon);
        r.service = t.get(c::kService);
        auto h = Hours::try_parse(t.get(c::kAvailableHours));
        if (!h || *h < Hours{}) {
            rejects.push_back(t.reject("invalid Available Hours"));
            continue;
        }
        r.available_hours = *h;
        rows.push_back(std::move(r));
    }
    return rows;
}

ParsedTables parse_tables(std::istream& census, std::istream& procedures,
                          std::istream* availability) {
    ParsedTables out;
    out.census = parse_census(census, out.rejects);
    out.procedures = parse_procedures(procedures, out.rejects);
    if (availability) out.availability = parse_availability(*availability, out.rejects);
    return out;
}

namespace {

std::ifstream open_input(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    return f;
}

}  // namespace

ParsedTables parse_tables(const std::filesystem::path& census,
                          const std::filesystem::path& procedures,
                          const std::optional<std::filesystem::path>& availability) {
    auto cf = open_input(census);
    auto pf = open_input(procedures);
    if (!availability) return parse_tables(cf, pf, nullptr);
    auto af = open_input(*availability);
    return parse_tables(cf, pf, &af);
}

namespace {

std::string opt_ts(const std::optional<Timestamp>& t) {
    return t ? format_timestamp(*t) : std::string{};
}

}  // namespace

void write_census(std::ostream& out, const std::vector<CensusRow>& rows) {
    write_csv_record(out, census_header());
    for (const auto& r : rows)
        write_csv_record(out, {r.primary_csn, r.dept, format_timestamp(r.effective_datetime),
                               format_timestamp(r.admission_datetime), opt_ts(r.discharge_datetime),
                               r.service, r.admit_type, r.admit_source});
}

void write_procedures(std::ostream& out, const std::vector<ProcedureRow>& rows) {
    write_csv_record(out, procedure_header());
    for (const auto& r : rows)
        write_csv_record(out, {r.primary_csn, r.primary_surgeon_id, r.location,
                               format_timestamp(r.scheduled_on), format_timestamp(r.scheduled_for),
                               format_timestamp(r.patient_in_room),
                               format_timestamp(r.patient_out_of_room), r.patient_class, r.service,
                               r.procedure_id});
}

void write_availability(std::ostream& out, const std::vector<SurgeonAvailabilityRow>& rows) {
    write_csv_record(out, availability_header());
    for (const auto& r : rows)
        write_csv_record(out, {r.date.iso(), r.primary_surgeon_id, r.service,
                               r.available_hours.str()});
}

std::vector<SurgeonAvailabilityRow> infer_surgeon_availability(
    const std::vector<ProcedureRow>& procedures, Hours threshold_hours, Hours block_hours) {
    struct Acc {
        std::int64_t seconds = 0;
        std::string service;
    };
    std::map<std::pair<Day, SurgeonId>, Acc> by_day;
    for (const auto& p : procedures) {
        auto& acc = by_day[{Day::of(p.patient_in_room), p.primary_surgeon_id}];
        acc.seconds += (p.patient_out_of_room - p.patient_in_room).count();
        if (!p.service.empty() && (acc.service.empty() || p.service < acc.service))
            acc.service = p.service;
    }
    // hundredths of an hour are 36 s, so the comparison is exact
    const std::int64_t threshold_seconds = threshold_hours.centi() * 36;
    std::vector<SurgeonAvailabilityRow> out;
    for (const auto& [key, acc] : by_day)
        if (acc.seconds > threshold_seconds)
            out.push_back({key.first, key.second, acc.service, block_hours});
    return out;
}

}  // namespace beds::ingest
