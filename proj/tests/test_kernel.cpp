#include <doctest.h>

#include <cmath>
#include <random>

#include "treequery/hash.hpp"
#include "treequery/kernel.hpp"

using namespace treequery;

TEST_CASE("flip_threshold maps alpha onto the 53-bit draw range") {
    CHECK(kernel::flip_threshold(0.0) == 0);
    CHECK(kernel::flip_threshold(1.0) == (1ull << 53));
    CHECK(kernel::flip_threshold(0.5) == (1ull << 52));
    CHECK(kernel::flip_threshold(0.25) == (1ull << 51));
    CHECK(kernel::flip_threshold(-0.1) == 0);
    CHECK(kernel::flip_threshold(1.5) == (1ull << 53));
}

TEST_CASE("stream_draw separates seats and keys") {
    auto a = hash::stream_draw(1, 0);
    auto b = hash::stream_draw(1, 1);
    auto c = hash::stream_draw(2, 0);
    CHECK(a != b);
    CHECK(a != c);
    CHECK(hash::stream_draw(1, 0) == a);
}

TEST_CASE("count_flips_scalar agrees with per-seat flips") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        std::uint64_t key = rng();
        std::uint64_t threshold = rng() % ((1ull << 53) + 1);
        int m = static_cast<int>(rng() % 40);
        int expected = 0;
        for (int s = 0; s < m; ++s) {
            expected += kernel::seat_flip(key, s, threshold) ? 1 : 0;
        }
        CHECK(kernel::count_flips_scalar(key, m, threshold) == expected);
    }
}

TEST_CASE("dispatched count_flips is bit-exact with the scalar kernel") {
    std::mt19937_64 rng(11);
    const int sizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 31, 55, 101, 1000};
    for (int m : sizes) {
        for (int iter = 0; iter < 50; ++iter) {
            std::uint64_t key = rng();
            std::uint64_t threshold = rng() % ((1ull << 53) + 1);
            CHECK(kernel::count_flips(key, m, threshold) ==
                  kernel::count_flips_scalar(key, m, threshold));
        }
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernel is bit-exact with the scalar kernel when available") {
    if (std::string(kernel::active_implementation()) != "avx2") return;
    std::mt19937_64 rng(13);
    const int sizes[] = {0, 1, 3, 4, 5, 8, 12, 13, 101, 2048};
    for (int m : sizes) {
        for (int iter = 0; iter < 100; ++iter) {
            std::uint64_t key = rng();
            std::uint64_t threshold = rng() % ((1ull << 53) + 1);
            CHECK(kernel::count_flips_avx2(key, m, threshold) ==
                  kernel::count_flips_scalar(key, m, threshold));
        }
        CHECK(kernel::count_flips_avx2(rng(), m, 0) == 0);
        CHECK(kernel::count_flips_avx2(rng(), m, 1ull << 53) == m);
    }
}
#endif

TEST_CASE("flip rate tracks alpha") {
    const double alpha = 0.3;
    const auto threshold = kernel::flip_threshold(alpha);
    const int m = 200000;
    int flips = kernel::count_flips(0x12345678u, m, threshold);
    double rate = static_cast<double>(flips) / m;
    double sigma = std::sqrt(alpha * (1 - alpha) / m);
    CHECK(std::abs(rate - alpha) < 5 * sigma);
}
