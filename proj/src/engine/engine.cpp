#include "beds/engine/engine.hpp"

#include "beds/core/errors.hpp"

#include <algorithm>
#include <tuple>

namespace beds::engine {

namespace {

template <class Key>
std::vector<Day> sort_by(std::span<const Day> candidates, Key key) {
    std::vector<Day> out(candidates.begin(), candidates.end());
    std::stable_sort(out.begin(), out.end(),
                     [&](Day a, Day b) { return std::tuple(key(a), a) < std::tuple(key(b), b); });
    return out;
}

}  // namespace

std::vector<Day> FewestAdmissionsPolicy::rank(const ScheduleState& state,
                                              const CaseRequest& request,
                                              std::span<const Day> candidates) const {
    return sort_by(candidates, [&](Day d) { return state.admissions(d, request.post_op_unit); });
}

std::vector<Day> EarliestDayPolicy::rank(const ScheduleState&, const CaseRequest&,
                                         std::span<const Day> candidates) const {
    return sort_by(candidates, [](Day) { return 0; });
}

std::vector<Day> MostSurgeonSlackPolicy::rank(const ScheduleState& state,
                                              const CaseRequest& request,
                                              std::span<const Day> candidates) const {
    return sort_by(candidates, [&](Day d) {
        return std::tuple(-state.hours(d, request.surgeon_id).centi(),
                          state.admissions(d, request.post_op_unit));
    });
}

std::unique_ptr<RankingPolicy> make_policy(std::string_view name) {
    if (name == "greedy" || name == "fewest-admissions-then-earliest")
        return std::make_unique<FewestAdmissionsPolicy>();
    if (name == "earliest") return std::make_unique<EarliestDayPolicy>();
    if (name == "most-surgeon-slack") return std::make_unique<MostSurgeonSlackPolicy>();
    throw ValidationError("unknown ranking policy '" + std::string(name) + "'");
}

std::vector<std::string> policy_names() {
    return {"greedy", "fewest-admissions-then-earliest", "earliest", "most-surgeon-slack"};
}

void validate_thresholds(std::span<const std::int64_t> thresholds) {
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] <= thresholds[i - 1])
            throw ValidationError("heatmap thresholds must be strictly increasing");
}

int color_bucket(std::int64_t count, std::span<const std::int64_t> thresholds) {
    return static_cast<int>(
        std::upper_bound(thresholds.begin(), thresholds.end(), count) - thresholds.begin());
}

std::vector<Day> candidate_days(const ScheduleState& state, const CaseRequest& request,
                                const EngineOptions& opts) {
    std::vector<Day> out;
    auto window = window_intersect(request.clinical_window, request.patient_window);
    if (!window) return out;
    Day last = window->end;
    if (opts.horizon_cap > 0 && window->length() > opts.horizon_cap)
        last = window->start + (opts.horizon_cap - 1);
    for (Day d = window->start; d <= last; ++d)
        if (state.hours(d, request.surgeon_id) >= request.duration_hours) out.push_back(d);
    return out;
}

Day recommend_greedy(const ScheduleState& state, const CaseRequest& request,
                     const EngineOptions& opts) {
    auto candidates = candidate_days(state, request, opts);
    if (candidates.empty())
        throw NoFeasibleDay("no feasible day for patient " + request.patient_id);
    // Candidates are ascending, so strict < keeps the earliest minimum.
    Day best = candidates.front();
    std::int64_t best_n = state.admissions(best, request.post_op_unit);
    for (Day d : candidates) {
        auto n = state.admissions(d, request.post_op_unit);
        if (n < best_n) {
            best = d;
            best_n = n;
        }
    }
    return best;
}

Recommendation recommend_topn(const ScheduleState& state, const CaseRequest& request,
                              const RankingPolicy& policy, int n,
                              std::span<const std::int64_t> thresholds, const EngineOptions& opts) {
    if (n < 1) throw ValidationError("n must be at least 1");
    auto candidates = candidate_days(state, request, opts);
    if (candidates.empty())
        throw NoFeasibleDay("no feasible day for patient " + request.patient_id);
    auto ranked = policy.rank(state, request, candidates);
    if (ranked.size() > static_cast<std::size_t>(n)) ranked.resize(static_cast<std::size_t>(n));

    Recommendation rec;
    rec.policy = std::string(policy.name());
    rec.ranked_days = ranked;
    for (Day d : ranked) {
        auto admissions = state.admissions(d, request.post_op_unit);
        rec.annotations.push_back(DayAnnotation{d, admissions, state.hours(d, request.surgeon_id),
                                                color_bucket(admissions, thresholds)});
    }
    return rec;
}

Booking book_request_inplace(ScheduleState& state, const CaseRequest& request, Day day,
                             std::string timestamp) {
    if (!request.clinical_window.contains(day) || !request.patient_window.contains(day))
        throw DayNotFeasible(day.iso() + " is outside the availability windows of patient " +
                             request.patient_id);
    Booking b{request.patient_id, request.surgeon_id, request.post_op_unit, day,
              request.duration_hours, state.next_sequence(), std::move(timestamp)};
    state.apply(b);  // InsufficientHours when h < g
    return b;
}

ScheduleState book_request(ScheduleState state, const CaseRequest& request, Day day,
                           std::string timestamp) {
    book_request_inplace(state, request, day, std::move(timestamp));
    return state;
}

std::vector<HeatmapCell> heatmap(const ScheduleState& state, const UnitId& unit,
                                 const SurgeonId& surgeon, const DateWindow& range,
                                 std::span<const std::int64_t> thresholds,
                                 std::optional<Hours> duration) {
    validate_thresholds(thresholds);
    std::vector<HeatmapCell> cells;
    cells.reserve(static_cast<std::size_t>(range.length()));
    for (Day d = range.start; d <= range.end; ++d) {
        HeatmapCell c;
        c.day = d;
        c.admissions = state.admissions(d, unit);
        c.surgeon_hours = state.hours(d, surgeon);
        c.bucket = color_bucket(c.admissions, thresholds);
        if (duration) c.feasible = c.surgeon_hours >= *duration;
        cells.push_back(c);
    }
    return cells;
}

}  // namespace beds::engine
