#pragma once

#include "beds/metrics/stats.hpp"

#include <cstdint>

namespace beds::metrics {

enum class ChangeKind { Relative, Absolute };

inline constexpr std::int64_t kDefaultBootstrapSamples = 100'000;
inline constexpr std::int64_t kDeskBootstrapSamples = 10'000;

struct BootstrapResult {
    double observed_change = 0;  // relative or absolute, per `kind`
    double p_value = 0;
    std::int64_t m = 0;
    double delta = 0;
    std::uint64_t seed = 0;
    ChangeKind kind = ChangeKind::Relative;
    std::int64_t undefined_replicates = 0;  // resamples with a zero median
};

/// One-sided bootstrap test on the change of the 90%-quantile-to-median ratio.
///
/// Statistic: r = (qmra(after) - qmra(before)) / qmra(before) (Relative) or
/// qmra(after) - qmra(before) (Absolute). Null: r >= -delta. Each replicate
/// resamples days with replacement independently within each series;
/// p = #{b : r*_b >= -delta} / m. Replicates whose resampled median is zero
/// have no defined statistic and are counted in favour of the null.
///
/// Replicate b draws from a random stream derived from (seed, b) only, so the
/// result does not depend on thread count or platform.
///
/// Throws EmptySeries, ZeroMedian (observed series), ValidationError.
BootstrapResult bootstrap_test(const DailySeries& before, const DailySeries& after, double delta,
                               std::int64_t m, std::uint64_t seed,
                               ChangeKind kind = ChangeKind::Relative, unsigned threads = 0);

// Deterministic counter-based stream used by the resampler.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    // Uniform in [0, bound), bound > 0; unbiased (multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace beds::metrics
