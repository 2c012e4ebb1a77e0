#include "treequery/kernel.hpp"

#include "treequery/hash.hpp"

namespace treequery::kernel {

std::uint64_t flip_threshold(double alpha) {
    if (alpha <= 0.0) return 0;
    if (alpha >= 1.0) return 1ull << 53;
    return static_cast<std::uint64_t>(alpha * 9007199254740992.0); // alpha * 2^53
}

bool seat_flip(std::uint64_t key, int seat, std::uint64_t threshold) {
    return (hash::stream_draw(key, static_cast<std::uint64_t>(seat)) >> 11) < threshold;
}

int count_flips_scalar(std::uint64_t key, int m, std::uint64_t threshold) {
    int flips = 0;
    for (int s = 0; s < m; ++s) {
        flips += seat_flip(key, s, threshold) ? 1 : 0;
    }
    return flips;
}

} // namespace treequery::kernel
