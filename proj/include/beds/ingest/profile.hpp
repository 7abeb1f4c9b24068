#pragma once

#include "beds/core/calendar.hpp"
#include "beds/core/hours.hpp"
#include "beds/core/model.hpp"
#include "beds/ingest/tables.hpp"
#include "beds/metrics/stats.hpp"

#include <json.hpp>

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace beds::ingest {

enum class PatientClass { SurgicalOutpatient, SurgicalAdmit, SurgicalInpatient, MedicalInpatient };

std::string to_string(PatientClass c);
PatientClass patient_class_from_string(const std::string& s);  // throws ParseError

// Maps the procedure table's free-text class. `has_surgery` false always gives
// MedicalInpatient.
PatientClass map_patient_class(const std::string& raw, bool has_surgery);

struct PatientProfile {
    PatientId primary_csn;
    PatientClass patient_class = PatientClass::MedicalInpatient;
    std::string patient_class_raw;
    Timestamp arrival_time;
    Timestamp admission_time;
    std::optional<DateWindow> available_window;  // absent when the formula gives an empty range
    std::vector<UnitId> unit_list;
    std::vector<Duration> los_list;
    std::vector<Timestamp> in_or_times;
    std::vector<Hours> or_durations;         // parallel to in_or_times
    std::vector<std::size_t> or_positions;  // unit_list index of each surgery
    SurgeonId primary_surgeon_id;

    bool is_surgical() const { return !in_or_times.empty(); }
    Day arrival_day() const { return Day::of(arrival_time); }
    Day admission_day() const { return Day::of(admission_time); }
    std::optional<Day> first_surgery_day() const;

    bool operator==(const PatientProfile&) const = default;
};

// Whole days between the calendar dates of arrival and admission.
std::int64_t lead_days(const PatientProfile& p);

bool classify_elective(const PatientProfile& p);

/// [max(d1 + 1, d0 - k), d0 + k] with k = floor(alpha * (d2 - d1)).
/// Returns nullopt when that range is empty. Throws NegativeLead when
/// d2 < d1, ValidationError when alpha is negative or not finite.
std::optional<DateWindow> available_window(Day d1, Day d0, Day d2, double alpha = 1.0);

// Index into unit_list of the first unit entered after the first surgery.
std::optional<std::size_t> first_post_or_index(const PatientProfile& p);

/// The unit and day counted as the patient's admission: the first unit after
/// the first surgery (kNoUnit and the surgery day if the trajectory ends in
/// the OR), or the first unit for patients without surgery.
struct AdmissionPoint {
    UnitId unit;
    Day day;
    std::size_t index = 0;  // position in unit_list, or unit_list.size() for kNoUnit
};
AdmissionPoint admission_point(const PatientProfile& p);

// Entry time of each unit: admission_time plus the preceding LOS.
std::vector<Timestamp> unit_entries(const PatientProfile& p);

struct IngestOptions {
    Day warmup_start;
    Day sim_start;
    std::set<UnitId> scope_units{"PICUs", "PCUs", "MAIN OR"};
    double alpha = 1.0;
    UnitId out_of_scope_label = "OTHER";

    static IngestOptions for_sim_start(Day sim_start, std::int64_t warmup_days = 365);
};

struct CleaningReport {
    std::int64_t input_patients = 0;
    std::int64_t profiles = 0;
    std::int64_t rejected_rows = 0;
    // patient exclusions by reason
    std::int64_t malformed_rows = 0;
    std::int64_t missing_in_out_room = 0;
    std::int64_t duplicates = 0;
    std::int64_t inconsecutive = 0;
    std::int64_t overnight = 0;
    std::int64_t inconsistent = 0;
    std::int64_t out_of_scope = 0;
    std::int64_t before_warmup = 0;

    std::int64_t excluded() const;
    bool balanced() const { return input_patients == profiles + excluded(); }
};

nlohmann::json to_json(const CleaningReport& r);

struct BuildResult {
    std::vector<PatientProfile> profiles;  // ordered by (arrival_time, primary_csn)
    CleaningReport report;
};

/// Joins census and procedure rows per primary_csn and reconstructs each
/// patient's trajectory. Patients touched by a rejected row are excluded
/// under malformed_rows / missing_in_out_room.
///
/// Trajectory: surgeries and census nights are merged in time order.
/// Consecutive nights in one unit form a stay. A stay is entered at the
/// preceding surgery's out-of-room time, at noon of its first night when it
/// follows another stay, or at hospital admission when it comes first.
/// Each LOS runs to the next entry; the final stay ends at discharge when
/// recorded (else after one day per night), a final surgery at out-of-room.
BuildResult build_profiles(const std::vector<CensusRow>& census,
                           const std::vector<ProcedureRow>& procedures,
                           const std::vector<Reject>& rejects, const IngestOptions& opts);

// Admission day/unit per profile as recorded.
std::vector<metrics::AdmissionRecord> recorded_admissions(
    const std::vector<PatientProfile>& profiles);

/// Ledger seeded with availability hours and one admission per profile on its
/// admission point. Surgeon hours on each profile's first surgery day are
/// reduced by that surgery's duration, never below zero.
ScheduleState initial_state(const std::vector<PatientProfile>& profiles,
                            const std::vector<SurgeonAvailabilityRow>& availability);

void to_json(nlohmann::json& j, const PatientProfile& p);
void from_json(const nlohmann::json& j, PatientProfile& p);

void write_profiles(std::ostream& out, const std::vector<PatientProfile>& profiles);
std::vector<PatientProfile> read_profiles(std::istream& in);  // throws ParseError

}  // namespace beds::ingest
