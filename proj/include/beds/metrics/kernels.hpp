#pragma once

// Integer reduction kernels behind the evaluation statistics.
//
// Daily admission counts are small non-negative integers, so every reduction
// here is carried out in exact 64-bit integer arithmetic. The scalar and
// vector variants therefore agree bit-for-bit, which the equivalence tests
// assert, and downstream statistics do not depend on which one ran.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace beds::metrics::kernels {

struct SumStats {
    std::int64_t sum = 0;
    std::int64_t sum_sq = 0;
    bool operator==(const SumStats&) const = default;
};

// Sums over the pairs (x[t], x[t + lag]) for t in [0, n - lag).
struct PairSums {
    std::int64_t n = 0;
    std::int64_t sx = 0;
    std::int64_t sy = 0;
    std::int64_t sxx = 0;
    std::int64_t syy = 0;
    std::int64_t sxy = 0;
    bool operator==(const PairSums&) const = default;
};

enum class Backend { Scalar, Avx2 };

namespace scalar {
SumStats sum_stats(std::span<const std::int32_t> x);
PairSums lagged_pair_sums(std::span<const std::int32_t> x, std::size_t lag);
std::size_t count_outside(std::span<const std::int32_t> x, std::int32_t lo, std::int32_t hi);
}  // namespace scalar

namespace avx2 {
// Only callable when avx2_available(); otherwise the process may fault.
SumStats sum_stats(std::span<const std::int32_t> x);
PairSums lagged_pair_sums(std::span<const std::int32_t> x, std::size_t lag);
std::size_t count_outside(std::span<const std::int32_t> x, std::int32_t lo, std::int32_t hi);
}  // namespace avx2

// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

// The backend used by the dispatching entry points below. Chosen once from
// CPU features; BEDS_KERNELS=scalar in the environment forces the reference path.
Backend active_backend();
// Throws ValidationError when the requested backend is unavailable.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

SumStats sum_stats(std::span<const std::int32_t> x);
PairSums lagged_pair_sums(std::span<const std::int32_t> x, std::size_t lag);
// Number of elements with x < lo or x > hi.
std::size_t count_outside(std::span<const std::int32_t> x, std::int32_t lo, std::int32_t hi);

}  // namespace beds::metrics::kernels
