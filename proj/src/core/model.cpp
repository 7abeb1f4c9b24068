#include "beds/core/model.hpp"

#include "beds/core/errors.hpp"

namespace beds {

void CaseRequest::validate() const {
    if (patient_id.empty()) throw ValidationError("patient_id is required");
    if (surgeon_id.empty()) throw ValidationError("surgeon_id is required");
    if (post_op_unit.empty()) throw ValidationError("post_op_unit is required");
    if (duration_hours <= Hours{}) throw ValidationError("duration_hours must be positive");
    if (clinical_window.end < clinical_window.start)
        throw ValidationError("clinical_window end before start");
    if (patient_window.end < patient_window.start)
        throw ValidationError("patient_window end before start");
}

Hours ScheduleState::hours(Day d, const SurgeonId& s) const {
    auto it = surgeon_hours_.find({d, s});
    return it == surgeon_hours_.end() ? Hours{} : it->second;
}

std::int64_t ScheduleState::admissions(Day d, const UnitId& u) const {
    auto it = unit_admissions_.find({d, u});
    return it == unit_admissions_.end() ? 0 : it->second;
}

void ScheduleState::set_hours(Day d, const SurgeonId& s, Hours h) {
    if (h < Hours{}) throw ValidationError("negative surgeon hours");
    if (h == Hours{})
        surgeon_hours_.erase({d, s});
    else
        surgeon_hours_[{d, s}] = h;
}

void ScheduleState::add_hours(Day d, const SurgeonId& s, Hours h) { set_hours(d, s, hours(d, s) + h); }

void ScheduleState::set_admissions(Day d, const UnitId& u, std::int64_t n) {
    if (n < 0) throw ValidationError("negative admission count");
    if (n == 0)
        unit_admissions_.erase({d, u});
    else
        unit_admissions_[{d, u}] = n;
}

void ScheduleState::set_day_attributes(Day d, Attributes attrs) {
    if (attrs.empty())
        day_attributes_.erase(d);
    else
        day_attributes_[d] = std::move(attrs);
}

void ScheduleState::apply(const Booking& b) {
    if (b.sequence_number <= last_sequence_)
        throw SequenceError("booking sequence " + std::to_string(b.sequence_number) +
                            " not after " + std::to_string(last_sequence_));
    if (b.duration_hours < Hours{}) throw ValidationError("negative booking duration");
    Hours remaining = hours(b.day, b.surgeon_id);
    if (remaining < b.duration_hours)
        throw InsufficientHours("surgeon " + b.surgeon_id + " has " + remaining.str() + "h on " +
                                b.day.iso() + ", needs " + b.duration_hours.str() + "h");

    // Reserve first so a throwing push_back leaves the ledger untouched.
    journal_.reserve(journal_.size() + 1);
    auto count = admissions(b.day, b.unit_id) + 1;
    unit_admissions_[{b.day, b.unit_id}] = count;
    Hours left = remaining - b.duration_hours;
    if (left == Hours{})
        surgeon_hours_.erase({b.day, b.surgeon_id});
    else
        surgeon_hours_[{b.day, b.surgeon_id}] = left;
    journal_.push_back(b);
    last_sequence_ = b.sequence_number;
}

bool ScheduleState::same_ledger(const ScheduleState& other) const {
    return surgeon_hours_ == other.surgeon_hours_ && unit_admissions_ == other.unit_admissions_ &&
           day_attributes_ == other.day_attributes_ && last_sequence_ == other.last_sequence_;
}

ScheduleState apply_booking(ScheduleState state, const Booking& b) {
    state.apply(b);
    return state;
}

ScheduleState replay(ScheduleState base, const std::vector<Booking>& journal) {
    for (const auto& b : journal) base.apply(b);
    return base;
}

}  // namespace beds
