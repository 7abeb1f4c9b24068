#pragma once

#include "beds/core/calendar.hpp"
#include "beds/core/hours.hpp"
#include "beds/core/model.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace beds::ingest {

struct CensusRow {
    PatientId primary_csn;
    UnitId dept;
    Timestamp effective_datetime;
    Timestamp admission_datetime;
    std::optional<Timestamp> discharge_datetime;
    std::string service;
    std::string admit_type;
    std::string admit_source;
};

struct ProcedureRow {
    PatientId primary_csn;
    SurgeonId primary_surgeon_id;
    UnitId location;
    Timestamp scheduled_on;
    Timestamp scheduled_for;
    Timestamp patient_in_room;
    Timestamp patient_out_of_room;
    std::string patient_class;
    std::string service;
    std::string procedure_id;
};

struct SurgeonAvailabilityRow {
    Day date;
    SurgeonId primary_surgeon_id;
    std::string service;
    Hours available_hours;

    bool operator==(const SurgeonAvailabilityRow&) const = default;
};

namespace columns {
// Midnight census
inline constexpr const char* kCsn = "Primary CSN";
inline constexpr const char* kDept = "Dept Abbrev";
inline constexpr const char* kEffective = "Effective Date/Time";
inline constexpr const char* kAdmission = "Hospital Admission Dt/Tm";
inline constexpr const char* kDischarge = "Hospital Discharge Dt/Tm";
inline constexpr const char* kService = "Service";
inline constexpr const char* kAdmitType = "Admit Type";
inline constexpr const char* kAdmitSource = "Admit Source";
// Procedure record
inline constexpr const char* kSurgeon = "Primary Surgeon ID";
inline constexpr const char* kLocation = "Location";
inline constexpr const char* kScheduledOn = "Originally Scheduled On";
inline constexpr const char* kScheduledFor = "Originally Scheduled For";
inline constexpr const char* kInRoom = "Patient in Room";
inline constexpr const char* kOutOfRoom = "Patient out of Room";
inline constexpr const char* kPatientClass = "Patient Class";
inline constexpr const char* kProcedureId = "Primary Procedure ID";
// Surgeon availability
inline constexpr const char* kDate = "Date";
inline constexpr const char* kAvailableHours = "Available Hours";
}  // namespace columns

std::vector<std::string> census_header();
std::vector<std::string> procedure_header();
std::vector<std::string> availability_header();

/// A row that could not be turned into a typed record. `row` is the 1-based
/// record number in the file, the header being record 1.
struct Reject {
    std::string table;  // "census" | "procedure" | "availability"
    std::size_t row = 0;
    PatientId primary_csn;  // empty when unknown
    std::string reason;
};

struct ParsedTables {
    std::vector<CensusRow> census;
    std::vector<ProcedureRow> procedures;
    std::optional<std::vector<SurgeonAvailabilityRow>> availability;
    std::vector<Reject> rejects;
};

// Header names are matched exactly; required columns must all be present,
// optional ones may be missing, unknown extra columns are ignored.
// Rows with an empty required field or the wrong number of fields go to
// `rejects`. A non-empty timestamp that cannot be parsed throws
// UnparseableTimestamp. A missing required header column throws MalformedHeader.
std::vector<CensusRow> parse_census(std::istream& in, std::vector<Reject>& rejects);
std::vector<ProcedureRow> parse_procedures(std::istream& in, std::vector<Reject>& rejects);
std::vector<SurgeonAvailabilityRow> parse_availability(std::istream& in,
                                                       std::vector<Reject>& rejects);

ParsedTables parse_tables(std::istream& census, std::istream& procedures,
                          std::istream* availability = nullptr);
// Throws std::runtime_error when a file cannot be opened.
ParsedTables parse_tables(const std::filesystem::path& census,
                          const std::filesystem::path& procedures,
                          const std::optional<std::filesystem::path>& availability = std::nullopt);

void write_census(std::ostream& out, const std::vector<CensusRow>& rows);
void write_procedures(std::ostream& out, const std::vector<ProcedureRow>& rows);
void write_availability(std::ostream& out, const std::vector<SurgeonAvailabilityRow>& rows);

/// Inferred surgeon availability: for each (day of patient-in-room, surgeon),
/// a block of `block_hours` when the summed in-room hours strictly exceed
/// `threshold_hours`. Output is sorted by (date, surgeon).
std::vector<SurgeonAvailabilityRow> infer_surgeon_availability(
    const std::vector<ProcedureRow>& procedures, Hours threshold_hours = Hours::from_centi(300),
    Hours block_hours = Hours::from_centi(700));

}  // namespace beds::ingest
