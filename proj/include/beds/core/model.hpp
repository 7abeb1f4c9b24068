#pragma once

#include "beds/core/calendar.hpp"
#include "beds/core/hours.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace beds {

using PatientId = std::string;
using SurgeonId = std::string;
using UnitId = std::string;

// Outpatient cases with no post-op bed are tracked under this unit.
inline const UnitId kNoUnit = "NONE";

using Attributes = std::map<std::string, std::string>;

struct CaseRequest {
    PatientId patient_id;
    SurgeonId surgeon_id;
    Hours duration_hours;
    DateWindow clinical_window;
    DateWindow patient_window;
    UnitId post_op_unit;
    Attributes extras;

    // Throws ValidationError.
    void validate() const;
};

struct Booking {
    PatientId patient_id;
    SurgeonId surgeon_id;
    UnitId unit_id;
    Day day;
    Hours duration_hours;
    std::uint64_t sequence_number = 0;
    std::string timestamp;  // wall clock (or simulated clock) at booking, ISO-8601

    bool operator==(const Booking&) const = default;
};

/// The live ledger: remaining surgeon hours and scheduled admissions per day.
///
/// Only nonzero entries are stored; lookups of unknown keys return zero.
/// Every mutation goes through apply(), which appends to the journal, so
/// replaying journal() on top of the state the journal started from
/// reproduces this ledger exactly.
class ScheduleState {
public:
    using SurgeonKey = std::pair<Day, SurgeonId>;
    using UnitKey = std::pair<Day, UnitId>;

    Hours hours(Day d, const SurgeonId& s) const;
    std::int64_t admissions(Day d, const UnitId& u) const;

    // Initial-state setup. These do not touch the journal.
    void set_hours(Day d, const SurgeonId& s, Hours h);
    void add_hours(Day d, const SurgeonId& s, Hours h);
    void set_admissions(Day d, const UnitId& u, std::int64_t n);
    void set_day_attributes(Day d, Attributes attrs);

    // Strong guarantee: on InsufficientHours / SequenceError the state is unchanged.
    void apply(const Booking& b);

    const std::map<SurgeonKey, Hours>& surgeon_hours() const { return surgeon_hours_; }
    const std::map<UnitKey, std::int64_t>& unit_admissions() const { return unit_admissions_; }
    const std::map<Day, Attributes>& day_attributes() const { return day_attributes_; }
    const std::vector<Booking>& journal() const { return journal_; }

    std::uint64_t last_sequence() const { return last_sequence_; }
    std::uint64_t next_sequence() const { return last_sequence_ + 1; }

    // Drops the in-memory journal while keeping the ledger; used after a
    // snapshot has made the journal prefix redundant.
    void compact_journal() { journal_.clear(); }
    void set_last_sequence(std::uint64_t s) { last_sequence_ = s; }

    // Ledger equality; the journal is not compared.
    bool same_ledger(const ScheduleState& other) const;

private:
    std::map<SurgeonKey, Hours> surgeon_hours_;
    std::map<UnitKey, std::int64_t> unit_admissions_;
    std::map<Day, Attributes> day_attributes_;
    std::vector<Booking> journal_;
    std::uint64_t last_sequence_ = 0;
};

ScheduleState apply_booking(ScheduleState state, const Booking& b);

// Folds a journal over a base state with apply().
ScheduleState replay(ScheduleState base, const std::vector<Booking>& journal);

}  // namespace beds
