#include "beds/sim/simulator.hpp"

#include "beds/core/errors.hpp"
#include "beds/ingest/csv.hpp"
#include "beds/metrics/bootstrap.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace beds::sim {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Arrival: return "ARRIVAL";
        case EventKind::TransferIn: return "TRANSFER_IN";
        case EventKind::ReadyToTransfer: return "READY_TO_TRANSFER";
        case EventKind::Discharge: return "DISCHARGE";
    }
    return "ARRIVAL";
}

bool EventQueue::Later::operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.sequence > b.sequence;
}

void EventQueue::push(SimEvent e) {
    e.sequence = next_seq_++;
    heap_.push(std::move(e));
}

SimEvent EventQueue::pop() {
    SimEvent e = heap_.top();
    heap_.pop();
    return e;
}

std::vector<SimEvent> next_events(const SimEvent& current, const ingest::PatientProfile& profile,
                                  std::int64_t delta_days, std::span<const Duration> los) {
    if (los.empty()) los = profile.los_list;
    const auto n = profile.unit_list.size();
    switch (current.kind) {
        case EventKind::Arrival: {
            if (n == 0) return {};
            Timestamp t = profile.admission_time + std::chrono::days{delta_days};
            return {SimEvent{EventKind::TransferIn, t, profile.primary_csn, profile.unit_list[0], 0, 0}};
        }
        case EventKind::TransferIn: {
            const auto k = current.position;
            return {SimEvent{EventKind::ReadyToTransfer, current.time + los[k], profile.primary_csn,
                             profile.unit_list[k], k, 0}};
        }
        case EventKind::ReadyToTransfer: {
            const auto k = current.position + 1;
            if (k >= n)
                return {SimEvent{EventKind::Discharge, current.time, profile.primary_csn,
                                 std::nullopt, current.position, 0}};
            return {SimEvent{EventKind::TransferIn, current.time, profile.primary_csn,
                             profile.unit_list[k], k, 0}};
        }
        case EventKind::Discharge: return {};
    }
    return {};
}

void SimConfig::validate() const {
    if (mode == SchedulerMode::Beds && beds_units.empty())
        throw ValidationError("beds_units must not be empty in Beds mode");
    if (!std::isfinite(alpha) || alpha < 0) throw ValidationError("alpha must be non-negative");
    if (los_perturbation && !(*los_perturbation >= 0 && *los_perturbation < 1))
        throw ValidationError("LOS perturbation fraction must lie in [0, 1)");
    engine::make_policy(policy);
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::optional<DateWindow> window_for(const ingest::PatientProfile& p, double alpha) {
    return ingest::available_window(p.arrival_day(), *p.first_surgery_day(), p.admission_day(), alpha);
}

}  // namespace

bool beds_eligible(const ingest::PatientProfile& p, const SimConfig& config) {
    if (config.mode != SchedulerMode::Beds || !p.is_surgical()) return false;
    if (p.arrival_day() < config.beds_start_date) return false;
    if (!ingest::classify_elective(p)) return false;
    if (p.primary_surgeon_id.empty() || p.or_durations.front() <= Hours{}) return false;
    if (!config.beds_units.count(ingest::admission_point(p).unit)) return false;
    return window_for(p, config.alpha).has_value();
}

std::vector<Duration> realized_los(const ingest::PatientProfile& p, const SimConfig& config) {
    if (!config.los_perturbation || *config.los_perturbation == 0) return p.los_list;
    const double f = *config.los_perturbation;
    const std::uint64_t base = config.rng_seed ^ fnv1a(p.primary_csn);
    std::vector<Duration> out;
    out.reserve(p.los_list.size());
    for (std::size_t k = 0; k < p.los_list.size(); ++k) {
        metrics::SplitMix64 rng(metrics::substream_seed(base, k));
        const double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
        const double factor = 1.0 + f * (2.0 * u - 1.0);
        const auto secs = std::llround(static_cast<double>(p.los_list[k].count()) * factor);
        out.emplace_back(std::max<std::int64_t>(1, secs));
    }
    return out;
}

SimResult run(const std::vector<ingest::PatientProfile>& profiles,
              const std::vector<ingest::SurgeonAvailabilityRow>& availability,
              const SimConfig& config) {
    config.validate();
    const auto policy = engine::make_policy(config.policy);
    const bool greedy = config.policy == "greedy";

    SimResult res;
    ScheduleState& state = res.final_state;
    for (const auto& r : availability) state.add_hours(r.date, r.primary_surgeon_id, r.available_hours);

    const std::size_t n = profiles.size();
    std::unordered_map<PatientId, std::size_t> index;
    index.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!index.emplace(profiles[i].primary_csn, i).second)
            throw ValidationError("duplicate patient " + profiles[i].primary_csn);

    std::vector<std::int64_t> delta(n, 0);
    std::vector<char> rescheduled(n, 0);
    std::vector<std::vector<Duration>> los(n);
    std::vector<std::vector<UnitVisit>> trajectory(n);
    for (std::size_t i = 0; i < n; ++i) los[i] = realized_los(profiles[i], config);

    auto book_historical = [&](const ingest::PatientProfile& p, const ingest::AdmissionPoint& ap,
                               bool consume) {
        Booking b;
        b.patient_id = p.primary_csn;
        b.surgeon_id = p.primary_surgeon_id;
        b.unit_id = ap.unit;
        b.day = ap.day;
        b.duration_hours = consume ? std::max(Hours{}, min(state.hours(ap.day, b.surgeon_id),
                                                           p.or_durations.front()))
                                   : Hours{};
        b.sequence_number = state.next_sequence();
        b.timestamp = format_timestamp(p.arrival_time);
        state.apply(b);
    };

    auto schedule = [&](std::size_t i) {
        const auto& p = profiles[i];
        if (!p.is_surgical()) return;
        const auto ap = ingest::admission_point(p);
        if (beds_eligible(p, config)) {
            const Day d1 = p.arrival_day();
            const Day d2 = p.admission_day();
            CaseRequest req;
            req.patient_id = p.primary_csn;
            req.surgeon_id = p.primary_surgeon_id;
            req.duration_hours = p.or_durations.front();
            req.patient_window = *window_for(p, config.alpha);
            // Keep the shifted admission after the arrival day.
            const Day earliest = d1 + 1 + std::max<std::int64_t>(0, ap.day - d2);
            const Day latest = config.engine.horizon_cap > 0 ? d1 + config.engine.horizon_cap
                                                             : req.patient_window.end;
            req.post_op_unit = ap.unit;
            if (earliest <= latest) {
                req.clinical_window = DateWindow{earliest, latest};
                try {
                    const Day day =
                        greedy ? engine::recommend_greedy(state, req, config.engine)
                               : engine::recommend_topn(state, req, *policy, 1,
                                                        engine::kDefaultThresholds, config.engine)
                                     .ranked_days.front();
                    engine::book_request_inplace(state, req, day, format_timestamp(p.arrival_time));
                    delta[i] = day - ap.day;
                    rescheduled[i] = 1;
                    ++res.rescheduled;
                    return;
                } catch (const NoFeasibleDay&) {
                }
            }
            ++res.fallbacks;
            book_historical(p, ap, true);
            return;
        }
        book_historical(p, ap, config.consume_historical_hours);
    };

    EventQueue queue;
    for (const auto& p : profiles)
        queue.push(SimEvent{EventKind::Arrival, p.arrival_time, p.primary_csn, std::nullopt, 0, 0});

    while (!queue.empty()) {
        SimEvent e = queue.pop();
        const std::size_t i = index.at(e.patient);
        switch (e.kind) {
            case EventKind::Arrival: schedule(i); break;
            case EventKind::TransferIn: trajectory[i].push_back({*e.unit, e.time, e.time}); break;
            case EventKind::ReadyToTransfer: trajectory[i].back().exit = e.time; break;
            case EventKind::Discharge: break;
        }
        for (auto& ne : next_events(e, profiles[i], delta[i], los[i])) queue.push(std::move(ne));
        res.events.push_back(std::move(e));
    }

    res.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = profiles[i];
        const auto ap = ingest::admission_point(p);
        SimRecord r;
        r.primary_csn = p.primary_csn;
        r.original_day = ap.day;
        r.unit = ap.unit;
        r.elective = ingest::classify_elective(p);
        r.rescheduled = rescheduled[i] != 0;
        r.trajectory = std::move(trajectory[i]);
        const std::size_t pos = ap.index < r.trajectory.size() ? ap.index
                                : p.or_positions.empty()       ? 0
                                                               : p.or_positions.front();
        r.simulated_day = r.trajectory.empty() ? ap.day : Day::of(r.trajectory[pos].entry);
        r.delta_days = r.simulated_day - r.original_day;
        res.records.push_back(std::move(r));
    }
    return res;
}

void write_event_log(std::ostream& out, const std::vector<SimEvent>& events) {
    for (const auto& e : events) {
        nlohmann::json j{{"kind", to_string(e.kind)},
                         {"time", format_timestamp(e.time)},
                         {"patient", e.patient}};
        if (e.unit) j["unit"] = *e.unit;
        out << j.dump() << '\n';
    }
}

void write_records_csv(std::ostream& out, const std::vector<SimRecord>& records) {
    ingest::write_csv_record(out, {"primary_csn", "original_day", "simulated_day", "delta_days",
                                   "unit", "elective", "rescheduled"});
    for (const auto& r : records)
        ingest::write_csv_record(out, {r.primary_csn, r.original_day.iso(), r.simulated_day.iso(),
                                       std::to_string(r.delta_days), r.unit,
                                       r.elective ? "1" : "0", r.rescheduled ? "1" : "0"});
}

}  // namespace beds::sim
