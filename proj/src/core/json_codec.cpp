#include "beds/core/json_codec.hpp"

#include "beds/core/errors.hpp"

#include <string>

namespace beds {

using nlohmann::json;

void to_json(json& j, const Day& d) { j = d.iso(); }

void from_json(const json& j, Day& d) {
    if (!j.is_string()) throw ValidationError("expected ISO date string");
    auto parsed = Day::try_parse(j.get_ref<const std::string&>());
    if (!parsed) throw ValidationError("invalid ISO date '" + j.get<std::string>() + "'");
    d = *parsed;
}

void to_json(json& j, const Hours& h) { j = h.to_double(); }

void from_json(const json& j, Hours& h) {
    if (j.is_number()) {
        h = Hours::from_double(j.get<double>());
    } else if (j.is_string()) {
        auto parsed = Hours::try_parse(j.get_ref<const std::string&>());
        if (!parsed) throw ValidationError("invalid hours value");
        h = *parsed;
    } else {
        throw ValidationError("hours must be a number");
    }
}

void to_json(json& j, const DateWindow& w) { j = json{{"start", w.start}, {"end", w.end}}; }

void from_json(const json& j, DateWindow& w) {
    if (!j.is_object() || !j.contains("start") || !j.contains("end"))
        throw ValidationError("window needs start and end");
    Day s = j.at("start").get<Day>();
    Day e = j.at("end").get<Day>();
    w = DateWindow{s, e};
}

void to_json(json& j, const CaseRequest& r) {
    j = json{{"patient_id", r.patient_id},
             {"surgeon_id", r.surgeon_id},
             {"duration_hours", r.duration_hours},
             {"clinical_window", r.clinical_window},
             {"patient_window", r.patient_window},
             {"post_op_unit", r.post_op_unit},
             {"extras", r.extras}};
}

void from_json(const json& j, CaseRequest& r) {
    if (!j.is_object()) throw ValidationError("case request must be an object");
    auto str = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j.at(key).is_string())
            throw ValidationError(std::string("missing string field '") + key + "'");
        return j.at(key).get<std::string>();
    };
    r.patient_id = str("patient_id");
    r.surgeon_id = str("surgeon_id");
    r.post_op_unit = str("post_op_unit");
    if (!j.contains("duration_hours")) throw ValidationError("missing field 'duration_hours'");
    r.duration_hours = j.at("duration_hours").get<Hours>();
    if (!j.contains("patient_window")) throw ValidationError("missing field 'patient_window'");
    r.patient_window = j.at("patient_window").get<DateWindow>();
    // A caller holding only one window passes it as both.
    r.clinical_window =
        j.contains("clinical_window") ? j.at("clinical_window").get<DateWindow>() : r.patient_window;
    r.extras.clear();
    if (j.contains("extras") && j.at("extras").is_object()) {
        for (const auto& [k, v] : j.at("extras").items())
            r.extras[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
}

void to_json(json& j, const Booking& b) {
    j = json{{"patient_id", b.patient_id},
             {"surgeon_id", b.surgeon_id},
             {"unit_id", b.unit_id},
             {"day", b.day},
             {"duration_hours", b.duration_hours},
             {"sequence_number", b.sequence_number},
             {"timestamp", b.timestamp}};
}

void from_json(const json& j, Booking& b) {
    b.patient_id = j.at("patient_id").get<std::string>();
    b.surgeon_id = j.at("surgeon_id").get<std::string>();
    b.unit_id = j.at("unit_id").get<std::string>();
    b.day = j.at("day").get<Day>();
    b.duration_hours = j.at("duration_hours").get<Hours>();
    b.sequence_number = j.at("sequence_number").get<std::uint64_t>();
    b.timestamp = j.at("timestamp").get<std::string>();
}

json ledger_to_json(const ScheduleState& s) {
    json hours = json::array();
    for (const auto& [key, h] : s.surgeon_hours())
        hours.push_back({{"day", key.first}, {"surgeon_id", key.second}, {"hours", h}});
    json units = json::array();
    for (const auto& [key, n] : s.unit_admissions())
        units.push_back({{"day", key.first}, {"unit_id", key.second}, {"admissions", n}});
    json attrs = json::array();
    for (const auto& [day, a] : s.day_attributes())
        attrs.push_back({{"day", day}, {"attributes", a}});
    return json{{"last_sequence", s.last_sequence()},
                {"surgeon_hours", std::move(hours)},
                {"unit_admissions", std::move(units)},
                {"day_attributes", std::move(attrs)}};
}

ScheduleState ledger_from_json(const json& j) {
    ScheduleState s;
    for (const auto& e : j.at("surgeon_hours"))
        s.set_hours(e.at("day").get<Day>(), e.at("surgeon_id").get<std::string>(),
                    e.at("hours").get<Hours>());
    for (const auto& e : j.at("unit_admissions"))
        s.set_admissions(e.at("day").get<Day>(), e.at("unit_id").get<std::string>(),
                         e.at("admissions").get<std::int64_t>());
    if (j.contains("day_attributes")) {
        for (const auto& e : j.at("day_attributes"))
            s.set_day_attributes(e.at("day").get<Day>(), e.at("attributes").get<Attributes>());
    }
    s.set_last_sequence(j.at("last_sequence").get<std::uint64_t>());
    return s;
}

void write_journal_line(std::ostream& out, const Booking& b) { out << json(b).dump() << '\n'; }

std::vector<Booking> read_journal(std::istream& in, bool* torn_tail) {
    std::vector<Booking> out;
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::string> pending_error;
    if (torn_tail) *torn_tail = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (pending_error) throw ParseError(*pending_error);
        try {
            out.push_back(json::parse(line).get<Booking>());
        } catch (const std::exception& e) {
            // Only tolerated if this turns out to be the last non-blank line.
            pending_error = "journal line " + std::to_string(line_no) + ": " + e.what();
        }
    }
    if (pending_error && torn_tail) *torn_tail = true;
    return out;
}

}  // namespace beds
