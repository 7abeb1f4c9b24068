#include <doctest.h>

#include "beds/metrics/kernels.hpp"

#include <random>
#include <vector>

using namespace beds::metrics::kernels;

namespace {

std::vector<std::int32_t> random_counts(std::mt19937_64& rng, std::size_t n, std::int32_t max) {
    std::vector<std::int32_t> v(n);
    for (auto& x : v) x = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(max + 1));
    return v;
}

struct BackendGuard {
    Backend saved = active_backend();
    ~BackendGuard() { set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar reference kernels on small hand cases") {
    std::vector<std::int32_t> v{3, 1, 4, 1, 5};
    CHECK(scalar::sum_stats(v) == SumStats{14, 52});
    auto p = scalar::lagged_pair_sums(v, 2);
    CHECK(p.n == 3);
    CHECK(p.sx == 8);
    CHECK(p.sy == 10);
    CHECK(p.sxy == 3 * 4 + 1 * 1 + 4 * 5);
    CHECK(scalar::lagged_pair_sums(v, 5).n == 0);
    CHECK(scalar::count_outside(v, 2, 4) == 3);
    CHECK(scalar::sum_stats({}) == SumStats{});
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
    if (!avx2_available()) {
        MESSAGE("AVX2 not available; equivalence test skipped on this host");
        return;
    }
    std::mt19937_64 rng(123);
    for (std::size_t n = 0; n < 70; ++n) {
        for (std::int32_t max : {0, 1, 7, 1000, 46000}) {
            auto v = random_counts(rng, n, max);
            CHECK(avx2::sum_stats(v) == scalar::sum_stats(v));
            for (std::size_t lag : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{5},
                                    n / 2, n, n + 1})
                CHECK(avx2::lagged_pair_sums(v, lag) == scalar::lagged_pair_sums(v, lag));
            for (auto [lo, hi] : {std::pair{2, 5}, std::pair{0, 0}, std::pair{0, 2147483647},
                                  std::pair{-5, -1}, std::pair{3, 2}})
                CHECK(avx2::count_outside(v, lo, hi) == scalar::count_outside(v, lo, hi));
        }
    }
    // Unaligned sub-spans.
    auto big = random_counts(rng, 1031, 20);
    for (std::size_t off = 0; off < 9; ++off) {
        std::span<const std::int32_t> s(big.data() + off, big.size() - off);
        CHECK(avx2::sum_stats(s) == scalar::sum_stats(s));
        CHECK(avx2::lagged_pair_sums(s, 7) == scalar::lagged_pair_sums(s, 7));
        CHECK(avx2::count_outside(s, 2, 5) == scalar::count_outside(s, 2, 5));
    }
}

TEST_CASE("runtime dispatch honours the selected backend") {
    BackendGuard guard;
    std::mt19937_64 rng(5);
    auto v = random_counts(rng, 333, 9);
    set_backend(Backend::Scalar);
    CHECK(active_backend() == Backend::Scalar);
    auto s = sum_stats(v);
    auto p = lagged_pair_sums(v, 5);
    auto c = count_outside(v, 2, 5);
    if (avx2_available()) {
        set_backend(Backend::Avx2);
        CHECK(backend_name(active_backend()) == "avx2");
        CHECK(sum_stats(v) == s);
        CHECK(lagged_pair_sums(v, 5) == p);
        CHECK(count_outside(v, 2, 5) == c);
    } else {
        CHECK_THROWS(set_backend(Backend::Avx2));
    }
}
