#include <doctest.h>

#include "beds/core/errors.hpp"
#include "beds/ingest/profile.hpp"
#include "beds/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace beds;

namespace {

std::string dump(const synth::SynthData& d) {
    std::ostringstream out;
    ingest::write_census(out, d.census);
    ingest::write_procedures(out, d.procedures);
    ingest::write_availability(out, d.availability);
    return out.str();
}

}  // namespace

TEST_CASE("synth is deterministic per seed") {
    synth::SynthConfig c;
    c.horizon_days = 60;
    c.seed = 1;
    auto a = dump(synth::generate(c));
    auto b = dump(synth::generate(c));
    CHECK(a == b);
    c.seed = 2;
    CHECK(dump(synth::generate(c)) != a);
}

TEST_CASE("synth arrival count matches the Poisson mean") {
    synth::SynthConfig c;
    c.horizon_days = 365;
    c.units = {{"PICUs", 2.0, 0, 0, 1.0, 0.5}};
    c.outpatient_rate = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        c.seed = seed;
        auto d = synth::generate(c);
        const double n = static_cast<double>(d.admissions.size());
        CHECK(std::abs(n - 730.0) <= 3 * std::sqrt(730.0));
        CHECK(d.procedures.size() == d.admissions.size());
    }
}

TEST_CASE("synth output round-trips through ingest with zero rejects") {
    synth::SynthConfig c;
    c.horizon_days = 120;
    c.seed = 11;
    auto d = synth::generate(c);
    std::stringstream cs, ps, as;
    ingest::write_census(cs, d.census);
    ingest::write_procedures(ps, d.procedures);
    ingest::write_availability(as, d.availability);
    auto t = ingest::parse_tables(cs, ps, &as);
    CHECK(t.rejects.empty());
    CHECK(t.census.size() == d.census.size());
    CHECK(t.procedures.size() == d.procedures.size());
    CHECK(*t.availability == d.availability);

    ingest::IngestOptions opts;
    opts.warmup_start = c.start;
    opts.sim_start = c.start;
    auto res = ingest::build_profiles(t.census, t.procedures, t.rejects, opts);
    CHECK(res.report.excluded() == 0);
    CHECK(res.report.profiles == static_cast<std::int64_t>(d.admissions.size()));

    // Recorded admission points equal the generator's ground truth.
    auto got = ingest::recorded_admissions(res.profiles);
    auto key = [](const metrics::AdmissionRecord& a) { return std::tuple(a.day, a.unit, a.elective); };
    std::vector<std::tuple<Day, UnitId, bool>> g, w;
    for (const auto& a : got) g.push_back(key(a));
    for (const auto& a : d.admissions) w.push_back(key(a));
    std::sort(g.begin(), g.end());
    std::sort(w.begin(), w.end());
    CHECK(g == w);
}

TEST_CASE("synth config validation and capacity") {
    synth::SynthConfig c;
    CHECK(c.capacity_ratio() >= 2.0);
    c.units[0].elective_rate = -1;
    CHECK_THROWS_AS(synth::generate(c), ValidationError);
    c = synth::SynthConfig{};
    c.blocks_per_week = 6;
    CHECK_THROWS_AS(synth::generate(c), ValidationError);
}
