#include "beds/metrics/bootstrap.hpp"

#include "beds/core/errors.hpp"
#include "quantile_detail.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

namespace beds::metrics {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(next()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 a(seed);
    SplitMix64 b(index ^ 0xd1b54a32d192ed03ULL);
    return a.next() ^ (b.next() * 0x9e3779b97f4a7c15ULL);
}

namespace {

// Resamples one series with replacement and returns its qmra via a
// counting-sort histogram (counts are small non-negative integers).
class Resampler {
public:
    explicit Resampler(const DailySeries& s) : values_(s.counts) {
        max_ = *std::max_element(values_.begin(), values_.end());
        hist_.assign(static_cast<std::size_t>(max_) + 1, 0);
    }

    std::optional<double> qmra(SplitMix64& rng) {
        std::fill(hist_.begin(), hist_.end(), 0);
        const std::uint64_t n = values_.size();
        for (std::uint64_t i = 0; i < n; ++i) ++hist_[static_cast<std::size_t>(values_[rng.below(n)])];
        const auto count = static_cast<std::int64_t>(n);
        auto kth = [this](std::int64_t k) -> std::int64_t { return this->kth(static_cast<std::size_t>(k)); };
        const std::int64_t med_num = detail::quantile_numerator(count, 1, 2, kth);
        if (med_num <= 0) return std::nullopt;
        const std::int64_t q90_num = detail::quantile_numerator(count, 9, 10, kth);
        return static_cast<double>(q90_num * 2) / static_cast<double>(med_num * 10);
    }

private:
    // k-th smallest resampled value.
    std::int32_t kth(std::size_t k) const {
        std::size_t cum = 0;
        for (std::size_t v = 0; v < hist_.size(); ++v) {
            cum += hist_[v];
            if (cum > k) return static_cast<std::int32_t>(v);
        }
        return max_;
    }

    const std::vector<std::int32_t>& values_;
    std::int32_t max_ = 0;
    std::vector<std::size_t> hist_;
};

double change(double before, double after, ChangeKind kind) {
    return kind == ChangeKind::Relative ? (after - before) / before : after - before;
}

struct Tally {
    std::int64_t at_least = 0;
    std::int64_t undefined = 0;
};

Tally run_replicates(const DailySeries& before, const DailySeries& after, double delta,
                     ChangeKind kind, std::uint64_t seed, std::int64_t first, std::int64_t last) {
    Resampler rb(before), ra(after);
    Tally t;
    for (std::int64_t b = first; b < last; ++b) {
        SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(b)));
        auto qb = rb.qmra(rng);
        auto qa = ra.qmra(rng);
        if (!qb || !qa) {
            ++t.undefined;
            ++t.at_least;
            continue;
        }
        if (change(*qb, *qa, kind) >= -delta) ++t.at_least;
    }
    return t;
}

}  // namespace

BootstrapResult bootstrap_test(const DailySeries& before, const DailySeries& after, double delta,
                               std::int64_t m, std::uint64_t seed, ChangeKind kind,
                               unsigned threads) {
    if (before.empty() || after.empty()) throw EmptySeries("bootstrap needs two nonempty series");
    if (!(delta >= 0)) throw ValidationError("delta must be non-negative");
    if (m < 1) throw ValidationError("m must be at least 1");

    auto sb = summarize(before);
    auto sa = summarize(after);
    if (!sb.qmra) throw ZeroMedian("median of the 'before' series is zero");
    if (!sa.qmra) throw ZeroMedian("median of the 'after' series is zero");

    BootstrapResult res;
    res.observed_change = change(*sb.qmra, *sa.qmra, kind);
    res.m = m;
    res.delta = delta;
    res.seed = seed;
    res.kind = kind;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(1, m / 2000)));

    std::vector<Tally> tallies(threads);
    std::vector<std::thread> pool;
    const std::int64_t chunk = (m + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::int64_t first = std::min<std::int64_t>(m, t * chunk);
        std::int64_t last = std::min<std::int64_t>(m, first + chunk);
        if (t + 1 == threads) {
            tallies[t] = run_replicates(before, after, delta, kind, seed, first, last);
        } else {
            pool.emplace_back([&, t, first, last] {
                tallies[t] = run_replicates(before, after, delta, kind, seed, first, last);
            });
        }
    }
    for (auto& th : pool) th.join();

    Tally total;
    for (const auto& t : tallies) {
        total.at_least += t.at_least;
        total.undefined += t.undefined;
    }
    res.p_value = static_cast<double>(total.at_least) / static_cast<double>(m);
    res.undefined_replicates = total.undefined;
    return res;
}

}  // namespace beds::metrics
