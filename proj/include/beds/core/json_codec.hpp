#pragma once

#include "beds/core/model.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <vector>

namespace beds {

void to_json(nlohmann::json& j, const Day& d);
void from_json(const nlohmann::json& j, Day& d);
void to_json(nlohmann::json& j, const Hours& h);
void from_json(const nlohmann::json& j, Hours& h);
void to_json(nlohmann::json& j, const DateWindow& w);
void from_json(const nlohmann::json& j, DateWindow& w);
void to_json(nlohmann::json& j, const CaseRequest& r);
void from_json(const nlohmann::json& j, CaseRequest& r);
void to_json(nlohmann::json& j, const Booking& b);
void from_json(const nlohmann::json& j, Booking& b);

// Ledger snapshot (journal excluded; last_sequence included).
nlohmann::json ledger_to_json(const ScheduleState& s);
ScheduleState ledger_from_json(const nlohmann::json& j);

// Newline-delimited booking journal. Reading tolerates a trailing newline and
// blank lines; a malformed final line (torn write) is skipped and reported
// via `torn_tail` when non-null. A malformed line elsewhere throws ParseError.
void write_journal_line(std::ostream& out, const Booking& b);
std::vector<Booking> read_journal(std::istream& in, bool* torn_tail = nullptr);

}  // namespace beds
