#include <doctest.h>

#include "beds/core/errors.hpp"
#include "beds/engine/engine.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace beds;
using namespace beds::engine;

namespace {

const Day kMon = Day::parse("2024-01-01");  // Monday

CaseRequest request(Day start, Day end, const char* hours = "2.5", const char* unit = "PICUs") {
    return CaseRequest{"p1", "s1", Hours::parse(hours), DateWindow{start, end},
                       DateWindow{start, end}, unit, {}};
}

// Independent oracles: scan every calendar day touched by either window and
// test membership directly, no intersection helper.
std::vector<Day> oracle_candidates(const ScheduleState& s, const CaseRequest& r) {
    std::vector<Day> out;
    Day lo = std::min(r.clinical_window.start, r.patient_window.start);
    Day hi = std::max(r.clinical_window.end, r.patient_window.end);
    for (Day d = lo; d <= hi; ++d) {
        bool in_both = r.clinical_window.start <= d && d <= r.clinical_window.end &&
                       r.patient_window.start <= d && d <= r.patient_window.end;
        if (in_both && s.hours(d, r.surgeon_id).centi() >= r.duration_hours.centi())
            out.push_back(d);
    }
    return out;
}

std::optional<Day> oracle_greedy(const ScheduleState& s, const CaseRequest& r) {
    std::optional<std::pair<std::int64_t, Day>> best;
    for (Day d : oracle_candidates(s, r)) {
        std::pair<std::int64_t, Day> key{s.admissions(d, r.post_op_unit), d};
        if (!best || key < *best) best = key;
    }
    if (!best) return std::nullopt;
    return best->second;
}

struct RandomInstance {
    ScheduleState state;
    CaseRequest req;
};

RandomInstance random_instance(std::mt19937_64& rng) {
    RandomInstance inst;
    std::uniform_int_distribution<int> hours(0, 8);
    std::uniform_int_distribution<int> count(0, 6);
    for (int k = 0; k < 40; ++k) {
        if (rng() % 3) inst.state.set_hours(kMon + k, "s1", Hours::from_centi(50 * hours(rng)));
        if (rng() % 2) inst.state.set_hours(kMon + k, "s2", Hours::from_centi(100 * hours(rng)));
        inst.state.set_admissions(kMon + k, "PICUs", count(rng));
        inst.state.set_admissions(kMon + k, "PCUs", count(rng));
    }
    std::uniform_int_distribution<int> pos(0, 30), len(0, 12);
    Day cs = kMon + pos(rng);
    Day ps = cs + static_cast<int>(rng() % 11) - 5;
    inst.req = CaseRequest{"p", rng() % 2 ? "s1" : "s2", Hours::from_centi(25 * (1 + rng() % 16)),
                           DateWindow{cs, cs + len(rng)}, DateWindow{ps, ps + len(rng)},
                           rng() % 2 ? "PICUs" : "PCUs", {}};
    return inst;
}

}  // namespace

TEST_CASE("candidate_days filters on hours inside the window") {
    ScheduleState s;
    s.set_hours(kMon, "s1", Hours::parse("5"));
    s.set_hours(kMon + 2, "s1", Hours::parse("5"));
    s.set_hours(kMon + 1, "s1", Hours::parse("2"));
    s.set_hours(kMon + 3, "s2", Hours::parse("5"));
    auto c = candidate_days(s, request(kMon, kMon + 4));
    CHECK(c == std::vector<Day>{kMon, kMon + 2});
    CHECK(candidate_days(s, request(kMon, kMon + 4, "6")).empty());

    auto disjoint = request(kMon, kMon + 1);
    disjoint.patient_window = DateWindow{kMon + 5, kMon + 6};
    CHECK(candidate_days(s, disjoint).empty());
}

TEST_CASE("candidate enumeration honours the horizon cap") {
    ScheduleState s;
    for (int k = 0; k < 30; ++k) s.set_hours(kMon + k, "s1", Hours::parse("8"));
    CHECK(candidate_days(s, request(kMon, kMon + 29), EngineOptions{10}).size() == 10);
    CHECK(candidate_days(s, request(kMon, kMon + 29)).size() == 30);
}

TEST_CASE("candidate_days equals the exhaustive scan on random states") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 500; ++i) {
        auto inst = random_instance(rng);
        CHECK(candidate_days(inst.state, inst.req) == oracle_candidates(inst.state, inst.req));
    }
}

TEST_CASE("recommend_greedy breaks ties by earliest day") {
    ScheduleState s;
    for (int k = 0; k < 3; ++k) s.set_hours(kMon + k, "s1", Hours::parse("8"));
    s.set_admissions(kMon, "PICUs", 3);
    s.set_admissions(kMon + 1, "PICUs", 1);
    s.set_admissions(kMon + 2, "PICUs", 1);
    CHECK(recommend_greedy(s, request(kMon, kMon + 2)) == kMon + 1);
    CHECK(recommend_greedy(s, request(kMon + 2, kMon + 2)) == kMon + 2);
    CHECK_THROWS_AS(recommend_greedy(s, request(kMon + 5, kMon + 9)), NoFeasibleDay);
}

TEST_CASE("recommend_greedy matches the two-key brute-force oracle") {
    std::mt19937_64 rng(99);
    int feasible = 0;
    for (int i = 0; i < 1000; ++i) {
        auto inst = random_instance(rng);
        auto expected = oracle_greedy(inst.state, inst.req);
        if (!expected) {
            CHECK_THROWS_AS(recommend_greedy(inst.state, inst.req), NoFeasibleDay);
            continue;
        }
        ++feasible;
        Day got = recommend_greedy(inst.state, inst.req);
        CHECK(got == *expected);
        // Framework subsumption.
        auto top = recommend_topn(inst.state, inst.req, FewestAdmissionsPolicy{}, 1);
        CHECK(top.ranked_days == std::vector<Day>{got});
    }
    CHECK(feasible > 500);
}

TEST_CASE("recommend_topn truncates and annotates") {
    ScheduleState s;
    for (int k = 0; k < 5; ++k) {
        s.set_hours(kMon + k, "s1", Hours::parse("4"));
        s.set_admissions(kMon + k, "PICUs", (k * 3) % 5);  // 0,3,1,4,2
    }
    auto rec = recommend_topn(s, request(kMon, kMon + 4), *make_policy("greedy"), 10);
    CHECK(rec.ranked_days == std::vector<Day>{kMon, kMon + 2, kMon + 4, kMon + 1, kMon + 3});
    REQUIRE(rec.annotations.size() == 5);
    CHECK(rec.annotations[1].admissions == 1);
    CHECK(rec.annotations[4].bucket == 2);  // 4 admissions vs [2,4,6]
    CHECK(rec.annotations[0].surgeon_hours == Hours::parse("4"));

    auto three = recommend_topn(s, request(kMon, kMon + 4), FewestAdmissionsPolicy{}, 3);
    CHECK(three.ranked_days.size() == 3);
    CHECK_THROWS_AS(recommend_topn(s, request(kMon, kMon + 4), FewestAdmissionsPolicy{}, 0),
                    ValidationError);
}

TEST_CASE("fewest-admissions policy equals the (count, day) sort oracle") {
    std::mt19937_64 rng(5);
    auto policy = make_policy("fewest-admissions-then-earliest");
    for (int i = 0; i < 300; ++i) {
        auto inst = random_instance(rng);
        auto cands = oracle_candidates(inst.state, inst.req);
        if (cands.empty()) continue;
        std::vector<std::pair<std::int64_t, Day>> keyed;
        for (Day d : cands) keyed.emplace_back(inst.state.admissions(d, inst.req.post_op_unit), d);
        std::sort(keyed.begin(), keyed.end());
        int n = 1 + static_cast<int>(rng() % 6);
        auto rec = recommend_topn(inst.state, inst.req, *policy, n);
        REQUIRE(rec.ranked_days.size() == std::min<std::size_t>(n, keyed.size()));
        for (std::size_t k = 0; k < rec.ranked_days.size(); ++k)
            CHECK(rec.ranked_days[k] == keyed[k].second);
    }
}

TEST_CASE("every policy returns a deterministic permutation of the candidates") {
    std::mt19937_64 rng(17);
    for (const auto& name : policy_names()) {
        auto policy = make_policy(name);
        for (int i = 0; i < 100; ++i) {
            auto inst = random_instance(rng);
            auto cands = candidate_days(inst.state, inst.req);
            auto ranked = policy->rank(inst.state, inst.req, cands);
            CHECK(std::set<Day>(ranked.begin(), ranked.end()) ==
                  std::set<Day>(cands.begin(), cands.end()));
            CHECK(ranked.size() == cands.size());
            std::vector<Day> reversed(cands.rbegin(), cands.rend());
            CHECK(policy->rank(inst.state, inst.req, reversed) == ranked);
        }
    }
    CHECK_THROWS_AS(make_policy("astrology"), ValidationError);
}

TEST_CASE("book_request read-your-writes and hour exhaustion") {
    ScheduleState s;
    s.set_hours(kMon, "s1", Hours::parse("2.5"));
    s.set_hours(kMon + 1, "s1", Hours::parse("5"));
    auto req = request(kMon, kMon + 1);

    auto after = book_request(s, req, kMon);
    CHECK(after.admissions(kMon, "PICUs") == 1);
    CHECK(candidate_days(after, req) == std::vector<Day>{kMon + 1});
    auto rec = recommend_topn(after, req, FewestAdmissionsPolicy{}, 2);
    CHECK(rec.annotations[0].admissions == 0);

    CHECK_THROWS_AS(book_request(after, req, kMon), InsufficientHours);
    CHECK_THROWS_AS(book_request(after, req, kMon + 4), DayNotFeasible);
    CHECK(after.journal().size() == 1);
    CHECK(after.journal()[0].sequence_number == 1);
}

TEST_CASE("booking is monotone on the ledger") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        auto inst = random_instance(rng);
        auto cands = candidate_days(inst.state, inst.req);
        if (cands.empty()) continue;
        Day d = cands[rng() % cands.size()];
        auto next = book_request(inst.state, inst.req, d);
        for (const auto& [k, n] : inst.state.unit_admissions())
            CHECK(next.admissions(k.first, k.second) >= n);
        for (const auto& [k, h] : next.surgeon_hours())
            CHECK(h <= inst.state.hours(k.first, k.second));
    }
}

TEST_CASE("sequential greedy booking achieves the minimal maximum on a symmetric window") {
    // Oracle: enumerate every assignment of k cases to 3 days.
    for (int k = 1; k <= 8; ++k) {
        int best_max = k;
        int total = 1;
        for (int i = 0; i < k; ++i) total *= 3;
        for (int code = 0; code < total; ++code) {
            int counts[3] = {0, 0, 0};
            for (int i = 0, c = code; i < k; ++i, c /= 3) ++counts[c % 3];
            best_max = std::min(best_max, std::max({counts[0], counts[1], counts[2]}));
        }
        CHECK(best_max == (k + 2) / 3);

        ScheduleState s;
        for (int d = 0; d < 3; ++d) s.set_hours(kMon + d, "s1", Hours::parse("40"));
        for (int i = 0; i < k; ++i) {
            auto req = request(kMon, kMon + 2, "1");
            req.patient_id = "p" + std::to_string(i);
            s = book_request(s, req, recommend_greedy(s, req));
        }
        std::int64_t mx = 0;
        for (int d = 0; d < 3; ++d) mx = std::max(mx, s.admissions(kMon + d, "PICUs"));
        CHECK(mx == best_max);
    }
}

TEST_CASE("heatmap buckets and cells") {
    ScheduleState s;
    DateWindow week{kMon, kMon + 6};
    auto empty = heatmap(s, "PICUs", "s1", week);
    CHECK(empty.size() == 7);
    for (const auto& c : empty) {
        CHECK(c.admissions == 0);
        CHECK(c.bucket == 0);
        CHECK_FALSE(c.feasible);
    }
    s.set_admissions(kMon + 1, "PICUs", 6);
    s.set_admissions(kMon + 2, "PICUs", 2);
    s.set_admissions(kMon + 3, "PICUs", 5);
    s.set_hours(kMon + 1, "s1", Hours::parse("3.5"));
    auto cells = heatmap(s, "PICUs", "s1", week, kDefaultThresholds, Hours::parse("3"));
    CHECK(cells[1].bucket == 3);
    CHECK(cells[2].bucket == 1);
    CHECK(cells[3].bucket == 2);
    CHECK(cells[1].surgeon_hours == Hours::parse("3.5"));
    CHECK(cells[1].feasible == true);
    CHECK(cells[0].feasible == false);

    CHECK(color_bucket(0, kDefaultThresholds) == 0);
    CHECK(color_bucket(1, kDefaultThresholds) == 0);
    CHECK(color_bucket(6, kDefaultThresholds) == 3);
    CHECK(color_bucket(100, kDefaultThresholds) == 3);
    std::vector<std::int64_t> bad{2, 2, 6};
    CHECK_THROWS_AS(heatmap(s, "PICUs", "s1", week, bad), ValidationError);
}
