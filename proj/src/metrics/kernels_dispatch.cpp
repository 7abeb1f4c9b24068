#include "beds/core/errors.hpp"
#include "beds/metrics/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace beds::metrics::kernels {

#if !defined(BEDS_HAVE_AVX2_KERNELS)
// Stubs so the symbols exist; avx2_available() keeps them unreachable.
namespace avx2 {
SumStats sum_stats(std::span<const std::int32_t> x) { return scalar::sum_stats(x); }
PairSums lagged_pair_sums(std::span<const std::int32_t> x, std::size_t lag) {
    return scalar::lagged_pair_sums(x, lag);
}
std::size_t count_outside(std::span<const std::int32_t> x, std::int32_t lo, std::int32_t hi) {
    return scalar::count_outside(x, lo, hi);
}
}  // namespace avx2
#endif

bool avx2_available() {
#if defined(BEDS_HAVE_AVX2_KERNELS) && (defined(__x86_64__) || defined(__i386__))
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") != 0;
    }();
    return supported;
#else
    return false;
#endif
}

namespace {

Backend detect() {
    if (const char* env = std::getenv("BEDS_KERNELS"); env && std::string(env) == "scalar")
        return Backend::Scalar;
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{detect()};
    return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available())
        throw ValidationError("AVX2 kernels are not available on this machine");
    backend_slot().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

SumStats sum_stats(std::span<const std::int32_t> x) {
    return active_backend() == Backend::Avx2 ? avx2::sum_stats(x) : scalar::sum_stats(x);
}

PairSums lagged_pair_sums(std::span<const std::int32_t> x, std::size_t lag) {
    return active_backend() == Backend::Avx2 ? avx2::lagged_pair_sums(x, lag)
                                             : scalar::lagged_pair_sums(x, lag);
}

std::size_t count_outside(std::span<const std::int32_t> x, std::int32_t lo, std::int32_t hi) {
    return active_backend() == Backend::Avx2 ? avx2::count_outside(x, lo, hi)
                                             : scalar::count_outside(x, lo, hi);
}

}  // namespace beds::metrics::kernels
