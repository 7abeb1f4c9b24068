#pragma once

#include "beds/core/calendar.hpp"
#include "beds/core/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace beds::sim {

struct UnitVisit {
    UnitId unit;
    Timestamp entry;
    Timestamp exit;
};

/// Per-patient outcome of a simulation run.
///
/// original_day / simulated_day are the days the patient entered their first
/// post-operative unit in the record and in the simulation (for patients
/// without one: the first unit of the trajectory). delta_days is the whole-day
/// shift applied to the trajectory by the scheduler.
struct SimRecord {
    PatientId primary_csn;
    Day original_day;
    Day simulated_day;
    std::int64_t delta_days = 0;
    UnitId unit;
    bool elective = false;
    bool rescheduled = false;  // scheduled by the recommendation engine
    std::vector<UnitVisit> trajectory;
};

}  // namespace beds::sim
