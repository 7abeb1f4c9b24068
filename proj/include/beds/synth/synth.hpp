#pragma once

#include "beds/core/calendar.hpp"
#include "beds/core/hours.hpp"
#include "beds/ingest/tables.hpp"
#include "beds/metrics/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace beds::synth {

struct UnitSpec {
    UnitId unit;
    double elective_rate = 0;  // scheduled surgical arrivals per day (Poisson mean)
    double emergent_rate = 0;  // same-day surgical admissions per day
    double medical_rate = 0;   // non-surgical admissions per day
    double los_mu = 1.0;       // log-normal nights, log scale
    double los_sigma = 0.5;
};

struct SynthConfig {
    Day start = Day(2019, 1, 1);
    std::int64_t horizon_days = 365;
    std::vector<UnitSpec> units{{"PICUs", 2.0, 0.3, 1.0, 1.1, 0.6}, {"PCUs", 3.0, 0.3, 1.5, 0.9, 0.5}};
    double outpatient_rate = 1.0;
    double lead_mean_days = 14.0;  // geometric, support >= 1
    double duration_mu = 0.8;      // log-normal hours
    double duration_sigma = 0.4;
    double transfer_prob = 0.3;    // first unit -> `transfer_unit` after part of the stay
    UnitId transfer_unit = "PCUs";
    int surgeons = 16;
    int blocks_per_week = 2;
    Hours block_hours = Hours::from_centi(700);
    std::string or_location = "MAIN OR";
    std::uint64_t seed = 1;

    void validate() const;  // throws ValidationError
    // Weekly block hours offered over expected weekly elective demand.
    double capacity_ratio() const;
};

struct SynthData {
    std::vector<ingest::CensusRow> census;
    std::vector<ingest::ProcedureRow> procedures;
    std::vector<ingest::SurgeonAvailabilityRow> availability;
    // Ground truth: the day each patient entered the unit counted as its admission.
    std::vector<metrics::AdmissionRecord> admissions;
};

SynthData generate(const SynthConfig& config);

}  // namespace beds::synth
