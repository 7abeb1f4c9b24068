#pragma once

#include "beds/core/model.hpp"
#include "beds/engine/engine.hpp"
#include "beds/ingest/profile.hpp"
#include "beds/ingest/tables.hpp"
#include "beds/sim/record.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace beds::sim {

enum class EventKind { Arrival, TransferIn, ReadyToTransfer, Discharge };

std::string to_string(EventKind k);

struct SimEvent {
    EventKind kind = EventKind::Arrival;
    Timestamp time;
    PatientId patient;
    std::optional<UnitId> unit;  // absent for Arrival / Discharge
    std::size_t position = 0;    // index into the patient's unit_list
    std::uint64_t sequence = 0;  // assigned by EventQueue::push

    bool operator==(const SimEvent&) const = default;
};

/// Min-queue on (time, kind, insertion order). Kinds at equal times pop in
/// the order Arrival, TransferIn, ReadyToTransfer, Discharge.
class EventQueue {
public:
    void push(SimEvent e);
    SimEvent pop();
    const SimEvent& top() const { return heap_.top(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const;
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

/// Successors of `current` for a patient whose trajectory is shifted by
/// `delta_days` and whose unit stays last `los` (defaults to the profile's).
std::vector<SimEvent> next_events(const SimEvent& current, const ingest::PatientProfile& profile,
                                  std::int64_t delta_days = 0, std::span<const Duration> los = {});

enum class SchedulerMode { Historical, Beds };

struct SimConfig {
    SchedulerMode mode = SchedulerMode::Historical;
    Day beds_start_date;
    std::set<UnitId> beds_units{"PICUs"};
    double alpha = 1.0;
    std::uint64_t rng_seed = 0;
    // Multiplicative LOS noise, uniform in [1 - f, 1 + f]; off when absent.
    std::optional<double> los_perturbation;
    // Also draw down surgeon hours for patients kept on their recorded day.
    bool consume_historical_hours = true;
    std::string policy = "greedy";
    engine::EngineOptions engine;

    void validate() const;  // throws ValidationError
};

struct SimResult {
    std::vector<SimEvent> events;   // in processing order
    std::vector<SimRecord> records; // one per profile, in profile order
    std::int64_t fallbacks = 0;     // eligible patients with no feasible day
    std::int64_t rescheduled = 0;   // patients placed by the engine
    ScheduleState final_state;
};

/// Runs the event loop. Profiles must be in (arrival_time, primary_csn)
/// order; every surgical patient is entered on the ledger at arrival.
SimResult run(const std::vector<ingest::PatientProfile>& profiles,
              const std::vector<ingest::SurgeonAvailabilityRow>& availability,
              const SimConfig& config);

bool beds_eligible(const ingest::PatientProfile& p, const SimConfig& config);

// Perturbed LOS for one patient; identical to the profile when perturbation is off.
std::vector<Duration> realized_los(const ingest::PatientProfile& p, const SimConfig& config);

void write_event_log(std::ostream& out, const std::vector<SimEvent>& events);
void write_records_csv(std::ostream& out, const std::vector<SimRecord>& records);

}  // namespace beds::sim
