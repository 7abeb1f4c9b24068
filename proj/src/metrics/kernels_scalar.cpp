#include "beds/metrics/kernels.hpp"

namespace beds::metrics::kernels::scalar {

SumStats sum_stats(std::span<const std::int32_t> x) {
    SumStats s;
    for (std::int32_t v : x) {
        s.sum += v;
        s.sum_sq += static_cast<std::int64_t>(v) * v;
    }
    return s;
}

PairSums lagged_pair_sums(std::span<const std::int32_t> x, std::size_t lag) {
    PairSums p;
    if (lag >= x.size()) return p;
    const std::size_t n = x.size() - lag;
    p.n = static_cast<std::int64_t>(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::int64_t a = x[t];
        const std::int64_t b = x[t + lag];
        p.sx += a;
        p.sy += b;
        p.sxx += a * a;
        p.syy += b * b;
        p.sxy += a * b;
    }
    return p;
}

std::size_t count_outside(std::span<const std::int32_t> x, std::int32_t lo, std::int32_t hi) {
    std::size_t n = 0;
    for (std::int32_t v : x) n += (v < lo || v > hi) ? 1 : 0;
    return n;
}

}  // namespace beds::metrics::kernels::scalar
