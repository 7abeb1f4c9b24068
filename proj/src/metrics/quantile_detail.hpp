#pragma once

#include <cstdint>

namespace beds::metrics::detail {

// Quantile at probability num/den as an exact fraction value_num / den.
// Linear interpolation between order statistics at index p * (n - 1);
// kth(i) must return the i-th smallest value (0-based).
template <class Kth>
std::int64_t quantile_numerator(std::int64_t n, std::int64_t num, std::int64_t den, Kth kth) {
    const std::int64_t h = num * (n - 1);
    const std::int64_t k = h / den;
    const std::int64_t frac = h - k * den;
    const std::int64_t lo = kth(k);
    if (frac == 0 || k + 1 >= n) return lo * den;
    const std::int64_t hi = kth(k + 1);
    return lo * (den - frac) + hi * frac;
}

}  // namespace beds::metrics::detail
