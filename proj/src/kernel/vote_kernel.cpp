#include "treequery/kernel.hpp"

namespace treequery::kernel {

namespace {

#if defined(__x86_64__) || defined(_M_X64)
bool detect_avx2() { return __builtin_cpu_supports("avx2"); }
const bool kUseAvx2 = detect_avx2();
#else
constexpr bool kUseAvx2 = false;
#endif

} // namespace

int count_flips(std::uint64_t key, int m, std::uint64_t threshold) {
#if defined(__x86_64__) || defined(_M_X64)
    if (kUseAvx2) return count_flips_avx2(key, m, threshold);
#endif
    return count_flips_scalar(key, m, threshold);
}

const char* active_implementation() { return kUseAvx2 ? "avx2" : "scalar"; }

} // namespace treequery::kernel
