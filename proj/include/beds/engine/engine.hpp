#pragma once

#include "beds/core/model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beds::engine {

inline constexpr std::int64_t kDefaultHorizonCap = 365;

struct EngineOptions {
    // Candidate enumeration never scans more than this many days.
    std::int64_t horizon_cap = kDefaultHorizonCap;
};

/// Pluggable ranking step of the recommendation framework.
///
/// rank() returns a subset of `candidates` ordered best-first. Implementations
/// must be deterministic functions of their inputs; ties left by the policy's
/// own objective are broken by earliest day.
class RankingPolicy {
public:
    virtual ~RankingPolicy() = default;
    virtual std::vector<Day> rank(const ScheduleState& state, const CaseRequest& request,
                                  std::span<const Day> candidates) const = 0;
    virtual std::string_view name() const = 0;
};

// Fewest scheduled admissions to the request's post-op unit, then earliest.
// With n = 1 this is the greedy recommendation.
class FewestAdmissionsPolicy final : public RankingPolicy {
public:
    std::vector<Day> rank(const ScheduleState&, const CaseRequest&,
                          std::span<const Day>) const override;
    std::string_view name() const override { return "fewest-admissions-then-earliest"; }
};

// Shortest wait: candidates in date order.
class EarliestDayPolicy final : public RankingPolicy {
public:
    std::vector<Day> rank(const ScheduleState&, const CaseRequest&,
                          std::span<const Day>) const override;
    std::string_view name() const override { return "earliest"; }
};

// Most surgeon hours left after the case, then fewest admissions, then earliest.
class MostSurgeonSlackPolicy final : public RankingPolicy {
public:
    std::vector<Day> rank(const ScheduleState&, const CaseRequest&,
                          std::span<const Day>) const override;
    std::string_view name() const override { return "most-surgeon-slack"; }
};

// Looks a policy up by name; "greedy" is an alias for the fewest-admissions
// policy. Throws ValidationError for unknown names.
std::unique_ptr<RankingPolicy> make_policy(std::string_view name);
std::vector<std::string> policy_names();

struct DayAnnotation {
    Day day;
    std::int64_t admissions = 0;
    Hours surgeon_hours;
    int bucket = 0;
};

struct Recommendation {
    std::vector<Day> ranked_days;
    std::vector<DayAnnotation> annotations;  // parallel to ranked_days
    std::string policy;
};

inline const std::vector<std::int64_t> kDefaultThresholds{2, 4, 6};

// Number of thresholds <= count. Thresholds must be strictly increasing.
int color_bucket(std::int64_t count, std::span<const std::int64_t> thresholds);
void validate_thresholds(std::span<const std::int64_t> thresholds);

// Days in clinical_window ∩ patient_window, ascending, with h >= duration.
std::vector<Day> candidate_days(const ScheduleState& state, const CaseRequest& request,
                                const EngineOptions& opts = {});

// Earliest day among the candidates minimising the unit's admissions.
// Throws NoFeasibleDay.
Day recommend_greedy(const ScheduleState& state, const CaseRequest& request,
                     const EngineOptions& opts = {});

// Throws NoFeasibleDay when there are no candidates; ValidationError if n < 1.
Recommendation recommend_topn(const ScheduleState& state, const CaseRequest& request,
                              const RankingPolicy& policy, int n,
                              std::span<const std::int64_t> thresholds = kDefaultThresholds,
                              const EngineOptions& opts = {});

// Books `request` on `day` and returns the new state.
// Throws DayNotFeasible when `day` lies outside the request windows, and
// InsufficientHours when it is inside them but the surgeon lacks time.
ScheduleState book_request(ScheduleState state, const CaseRequest& request, Day day,
                           std::string timestamp = {});
// In-place variant; same errors, state unchanged on error. Returns the booking.
Booking book_request_inplace(ScheduleState& state, const CaseRequest& request, Day day,
                             std::string timestamp = {});

struct HeatmapCell {
    Day day;
    std::int64_t admissions = 0;
    Hours surgeon_hours;
    int bucket = 0;
    // Present only when the query carried a case duration.
    std::optional<bool> feasible;
};

std::vector<HeatmapCell> heatmap(const ScheduleState& state, const UnitId& unit,
                                 const SurgeonId& surgeon, const DateWindow& range,
                                 std::span<const std::int64_t> thresholds = kDefaultThresholds,
                                 std::optional<Hours> duration = std::nullopt);

}  // namespace beds::engine
