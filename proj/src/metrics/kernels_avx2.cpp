// Compiled with -mavx2; only entered after a runtime CPU check.
#include "beds/metrics/kernels.hpp"

#include <immintrin.h>

namespace beds::metrics::kernels::avx2 {

namespace {

// Horizontal sum of four signed 64-bit lanes.
inline std::int64_t hsum_epi64(__m256i v) {
    __m128i lo = _mm256_castsi256_si128(v);
    __m128i hi = _mm256_extracti128_si256(v, 1);
    __m128i s = _mm_add_epi64(lo, hi);
    return _mm_cvtsi128_si64(s) + _mm_extract_epi64(s, 1);
}

// Loads four int32 and sign-extends them to 64-bit lanes.
inline __m256i load4_epi64(const std::int32_t* p) {
    return _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p)));
}

}  // namespace

SumStats sum_stats(std::span<const std::int32_t> x) {
    const std::int32_t* p = x.data();
    const std::size_t n = x.size();
    __m256i acc = _mm256_setzero_si256();
    __m256i acc_sq = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i v = load4_epi64(p + i);
        acc = _mm256_add_epi64(acc, v);
        // mul_epi32 multiplies the low signed 32 bits of each 64-bit lane.
        acc_sq = _mm256_add_epi64(acc_sq, _mm256_mul_epi32(v, v));
    }
    SumStats s{hsum_epi64(acc), hsum_epi64(acc_sq)};
    for (; i < n; ++i) {
        s.sum += p[i];
        s.sum_sq += static_cast<std::int64_t>(p[i]) * p[i];
    }
    return s;
}

PairSums lagged_pair_sums(std::span<const std::int32_t> x, std::size_t lag) {
    PairSums out;
    if (lag >= x.size()) return out;
    const std::size_t n = x.size() - lag;
    const std::int32_t* a = x.data();
    const std::int32_t* b = x.data() + lag;
    __m256i sx = _mm256_setzero_si256(), sy = _mm256_setzero_si256();
    __m256i sxx = _mm256_setzero_si256(), syy = _mm256_setzero_si256();
    __m256i sxy = _mm256_setzero_si256();
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        __m256i va = load4_epi64(a + t);
        __m256i vb = load4_epi64(b + t);
        sx = _mm256_add_epi64(sx, va);
        sy = _mm256_add_epi64(sy, vb);
        sxx = _mm256_add_epi64(sxx, _mm256_mul_epi32(va, va));
        syy = _mm256_add_epi64(syy, _mm256_mul_epi32(vb, vb));
        sxy = _mm256_add_epi64(sxy, _mm256_mul_epi32(va, vb));
    }
    out.n = static_cast<std::int64_t>(n);
    out.sx = hsum_epi64(sx);
    out.sy = hsum_epi64(sy);
    out.sxx = hsum_epi64(sxx);
    out.syy = hsum_epi64(syy);
    out.sxy = hsum_epi64(sxy);
    for (; t < n; ++t) {
        const std::int64_t va = a[t], vb = b[t];
        out.sx += va;
        out.sy += vb;
        out.sxx += va * va;
        out.syy += vb * vb;
        out.sxy += va * vb;
    }
    return out;
}

std::size_t count_outside(std::span<const std::int32_t> x, std::int32_t lo, std::int32_t hi) {
    const std::int32_t* p = x.data();
    const std::size_t n = x.size();
    const __m256i vlo = _mm256_set1_epi32(lo);
    const __m256i vhi = _mm256_set1_epi32(hi);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
        __m256i below = _mm256_cmpgt_epi32(vlo, v);
        __m256i above = _mm256_cmpgt_epi32(v, vhi);
        int mask = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_or_si256(below, above)));
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    for (; i < n; ++i) count += (p[i] < lo || p[i] > hi) ? 1 : 0;
    return count;
}

}  // namespace beds::metrics::kernels::avx2
