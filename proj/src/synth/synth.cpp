#include "beds/synth/synth.hpp"

#include "beds/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace beds::synth {

void SynthConfig::validate() const {
    if (horizon_days < 1) throw ValidationError("horizon must be at least one day");
    if (units.empty()) throw ValidationError("at least one unit is required");
    for (const auto& u : units) {
        if (u.unit.empty()) throw ValidationError("unit name must not be empty");
        if (!(u.elective_rate >= 0 && u.emergent_rate >= 0 && u.medical_rate >= 0))
            throw ValidationError("rates must be non-negative");
        if (!(u.los_sigma >= 0)) throw ValidationError("LOS sigma must be non-negative");
    }
    if (!(outpatient_rate >= 0)) throw ValidationError("rates must be non-negative");
    if (!(lead_mean_days >= 1)) throw ValidationError("lead mean must be at least one day");
    if (!(duration_sigma >= 0)) throw ValidationError("duration sigma must be non-negative");
    if (!(transfer_prob >= 0 && transfer_prob <= 1))
        throw ValidationError("transfer probability must lie in [0, 1]");
    if (surgeons < 1) throw ValidationError("at least one surgeon is required");
    if (blocks_per_week < 1 || blocks_per_week > 5)
        throw ValidationError("blocks per week must be between 1 and 5");
    if (block_hours < Hours::from_centi(100) || block_hours > Hours::from_centi(1500))
        throw ValidationError("block hours must be between 1 and 15");
}

namespace {

constexpr std::int64_t kFirstCaseMinute = 7 * 60 + 30;

std::int64_t max_case_minutes(const SynthConfig& c) {
    return std::max<std::int64_t>(15, c.block_hours.centi() * 60 / 100 - 15);
}

double mean_case_minutes(const SynthConfig& c) {
    // unclipped log-normal mean, an upper bound on the clipped one
    return std::min(60.0 * std::exp(c.duration_mu + c.duration_sigma * c.duration_sigma / 2),
                    static_cast<double>(max_case_minutes(c)));
}

}  // namespace

double SynthConfig::capacity_ratio() const {
    double rate = outpatient_rate;
    for (const auto& u : units) rate += u.elective_rate;
    const double demand = rate * 7.0 * mean_case_minutes(*this);
    const double supply = static_cast<double>(surgeons) * blocks_per_week *
                          static_cast<double>(block_hours.centi()) * 0.6;
    return demand > 0 ? supply / demand : INFINITY;
}

namespace {

class Generator {
public:
    explicit Generator(const SynthConfig& c) : c_(c), rng_(c.seed) {
        std::vector<unsigned> days{0, 1, 2, 3, 4};
        for (int s = 0; s < c.surgeons; ++s) {
            std::shuffle(days.begin(), days.end(), rng_);
            std::array<bool, 7> mask{};
            for (int b = 0; b < c.blocks_per_week; ++b) mask[days[static_cast<std::size_t>(b)]] = true;
            block_days_.push_back(mask);
            surgeon_ids_.push_back("S" + std::to_string(s + 1));
        }
    }

    SynthData run() {
        struct Arrival {
            Timestamp time;
            int kind;  // 0 elective, 1 emergent, 2 medical, 3 outpatient
            std::size_t unit;
        };
        for (std::int64_t t = 0; t < c_.horizon_days; ++t) {
            const Day d = c_.start + t;
            std::vector<Arrival> today;
            auto add = [&](double rate, int kind, std::size_t unit) {
                if (rate <= 0) return;
                std::poisson_distribution<int> pois(rate);
                const int k = pois(rng_);
                for (int i = 0; i < k; ++i) today.push_back({arrival_time(d, kind), kind, unit});
            };
            for (std::size_t u = 0; u < c_.units.size(); ++u) {
                add(c_.units[u].elective_rate, 0, u);
                add(c_.units[u].emergent_rate, 1, u);
                add(c_.units[u].medical_rate, 2, u);
            }
            add(c_.outpatient_rate, 3, 0);
            std::stable_sort(today.begin(), today.end(),
                             [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
            for (const auto& a : today) {
                const std::string csn = std::to_string(100000 + next_csn_++);
                switch (a.kind) {
                    case 0: elective(csn, a.time, &c_.units[a.unit]); break;
                    case 1: emergent(csn, a.time, c_.units[a.unit]); break;
                    case 2: medical(csn, a.time, c_.units[a.unit]); break;
                    default: elective(csn, a.time, nullptr); break;
                }
            }
        }
        emit_availability();
        return std::move(out_);
    }

private:
    Timestamp arrival_time(Day d, int kind) {
        // Elective requests during office hours; admissions any time before noon.
        std::uniform_int_distribution<int> minute(kind == 0 || kind == 3 ? 8 * 60 : 0,
                                                  kind == 0 || kind == 3 ? 17 * 60 : 11 * 60);
        return d.midnight() + std::chrono::minutes{minute(rng_)};
    }

    std::int64_t case_minutes() {
        std::lognormal_distribution<double> dist(c_.duration_mu, c_.duration_sigma);
        auto m = static_cast<std::int64_t>(std::llround(60.0 * dist(rng_)));
        return std::clamp<std::int64_t>(m, 15, max_case_minutes(c_));
    }

    std::int64_t nights(const UnitSpec& u) {
        std::lognormal_distribution<double> dist(u.los_mu, u.los_sigma);
        return std::max<std::int64_t>(1, std::llround(dist(rng_)));
    }

    std::int64_t lead_days() {
        std::geometric_distribution<int> g(1.0 / c_.lead_mean_days);
        return 1 + g(rng_);
    }

    // Census nights from `first` with a possible step-down transfer; returns
    // the discharge time.
    void stay(const std::string& csn, const UnitSpec& u, Day first, Timestamp admitted) {
        const auto n = nights(u);
        std::int64_t split = n;
        if (n >= 2 && u.unit != c_.transfer_unit && !c_.transfer_unit.empty()) {
            std::bernoulli_distribution tr(c_.transfer_prob);
            if (tr(rng_)) split = std::max<std::int64_t>(1, n / 2);
        }
        std::uniform_int_distribution<int> discharge_minute(9 * 60, 16 * 60);
        const Timestamp discharge = (first + n).midnight() + std::chrono::minutes{discharge_minute(rng_)};
        for (std::int64_t k = 0; k < n; ++k) {
            ingest::CensusRow r;
            r.primary_csn = csn;
            r.dept = k < split ? u.unit : c_.transfer_unit;
            r.effective_datetime = (first + k).at(23, 59);
            r.admission_datetime = admitted;
            r.discharge_datetime = discharge;
            r.service = "General Pediatrics";
            r.admit_type = "Elective";
            r.admit_source = "Home";
            out_.census.push_back(std::move(r));
        }
    }

    void elective(const std::string& csn, Timestamp arrival, const UnitSpec* unit) {
        std::uniform_int_distribution<int> pick(0, c_.surgeons - 1);
        const auto s = static_cast<std::size_t>(pick(rng_));
        const auto dur = case_minutes();
        Day d = Day::of(arrival) + lead_days();
        const std::int64_t cap = c_.block_hours.centi() * 60 / 100;
        while (!(block_days_[s][d.iso_weekday_index()] && used_[{d, s}] + dur <= cap)) ++d;
        const Timestamp in = d.midnight() + std::chrono::minutes{kFirstCaseMinute + used_[{d, s}]};
        used_[{d, s}] += dur;
        last_surgery_day_ = std::max(last_surgery_day_, d);

        ingest::ProcedureRow p;
        p.primary_csn = csn;
        p.primary_surgeon_id = surgeon_ids_[s];
        p.location = c_.or_location;
        p.scheduled_on = arrival;
        p.scheduled_for = in;
        p.patient_in_room = in;
        p.patient_out_of_room = in + std::chrono::minutes{dur};
        p.patient_class = unit ? "Surgery Admit" : "Outpatient Surgery";
        p.service = "Surgery";
        p.procedure_id = std::to_string(1 + dur % 97);
        out_.procedures.push_back(p);
        if (unit) {
            stay(csn, *unit, d, in - std::chrono::hours{1});
            out_.admissions.push_back({d, unit->unit, true});
        } else {
            out_.admissions.push_back({d, kNoUnit, true});
        }
    }

    void emergent(const std::string& csn, Timestamp arrival, const UnitSpec& u) {
        std::uniform_int_distribution<int> wait(60, 240);
        const Timestamp in = arrival + std::chrono::minutes{wait(rng_)};
        ingest::ProcedureRow p;
        p.primary_csn = csn;
        p.primary_surgeon_id = "ER";
        p.location = c_.or_location;
        p.scheduled_on = arrival;
        p.scheduled_for = in;
        p.patient_in_room = in;
        p.patient_out_of_room = in + std::chrono::minutes{case_minutes()};
        p.patient_class = "Inpatient";
        p.service = "Surgery";
        out_.procedures.push_back(p);
        stay(csn, u, Day::of(in), arrival);
        out_.admissions.push_back({Day::of(in), u.unit, false});
    }

    void medical(const std::string& csn, Timestamp arrival, const UnitSpec& u) {
        stay(csn, u, Day::of(arrival), arrival);
        out_.admissions.push_back({Day::of(arrival), u.unit, false});
    }

    void emit_availability() {
        const Day last = std::max(last_surgery_day_, c_.start + c_.horizon_days) + 60;
        for (Day d = c_.start; d <= last; ++d)
            for (std::size_t s = 0; s < surgeon_ids_.size(); ++s)
                if (block_days_[s][d.iso_weekday_index()])
                    out_.availability.push_back({d, surgeon_ids_[s], "Surgery", c_.block_hours});
    }

    const SynthConfig& c_;
    std::mt19937_64 rng_;
    std::vector<std::array<bool, 7>> block_days_;
    std::vector<SurgeonId> surgeon_ids_;
    std::map<std::pair<Day, std::size_t>, std::int64_t> used_;
    Day last_surgery_day_;
    std::int64_t next_csn_ = 1;
    SynthData out_;
};

}  // namespace

SynthData generate(const SynthConfig& config) {
    config.validate();
    return Generator(config).run();
}

}  // namespace beds::synth
