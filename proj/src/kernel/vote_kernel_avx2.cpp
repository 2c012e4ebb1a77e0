#include "treequery/kernel.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "treequery/hash.hpp"

namespace treequery::kernel {

namespace {

// 64-bit low multiply from 32-bit pieces (AVX2 has no _mm256_mullo_epi64).
inline __m256i mullo64(__m256i a, __m256i b) {
    __m256i bswap = _mm256_shuffle_epi32(b, 0xB1);
    __m256i prodlh = _mm256_mullo_epi32(a, bswap);
    __m256i zero = _mm256_setzero_si256();
    __m256i prodlh2 = _mm256_hadd_epi32(prodlh, zero);
    __m256i prodlh3 = _mm256_shuffle_epi32(prodlh2, 0x73);
    __m256i prodll = _mm256_mul_epu32(a, b);
    return _mm256_add_epi64(prodll, prodlh3);
}

inline __m256i mix64_lanes(__m256i z) {
    const __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(0xbf58476d1ce4e5b9ull));
    const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(0x94d049bb133111ebull));
    z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 30)), c1);
    z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 27)), c2);
    return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

} // namespace

int count_flips_avx2(std::uint64_t key, int m, std::uint64_t threshold) {
    const std::uint64_t g = hash::kGamma;
    // Draw values are < 2^53 and threshold <= 2^53, so signed 64-bit compare is safe.
    const __m256i thr = _mm256_set1_epi64x(static_cast<long long>(threshold));
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * g));
    __m256i state = _mm256_set_epi64x(static_cast<long long>(key + 4 * g),
                                      static_cast<long long>(key + 3 * g),
                                      static_cast<long long>(key + 2 * g),
                                      static_cast<long long>(key + 1 * g));
    __m256i acc = _mm256_setzero_si256();
    int s = 0;
    for (; s + 4 <= m; s += 4) {
        __m256i draw = _mm256_srli_epi64(mix64_lanes(state), 11);
        __m256i hit = _mm256_cmpgt_epi64(thr, draw);
        acc = _mm256_sub_epi64(acc, hit);
        state = _mm256_add_epi64(state, step);
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    int flips = static_cast<int>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
    for (; s < m; ++s) {
        flips += seat_flip(key, s, threshold) ? 1 : 0;
    }
    return flips;
}

} // namespace treequery::kernel

#endif
