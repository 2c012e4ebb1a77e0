#pragma once

#include <cstdint>
#include <string_view>

namespace treequery::hash {

// All simulated-backend randomness is derived from these two primitives so
// that every draw is a pure function of its call identity. Byte order is
// pinned explicitly; results are identical across platforms.

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;
inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

inline std::uint64_t fnv1a(std::uint64_t h, std::uint8_t byte) {
    return (h ^ byte) * kFnvPrime;
}

inline std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        h = fnv1a(h, static_cast<std::uint8_t>(value >> (8 * i)));
    }
    return h;
}

inline std::uint64_t fnv1a(std::uint64_t h, std::string_view text) {
    for (unsigned char c : text) {
        h = fnv1a(h, static_cast<std::uint8_t>(c));
    }
    // Length terminator keeps concatenated fields unambiguous.
    return fnv1a(h, static_cast<std::uint64_t>(text.size()));
}

/// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// index-th draw of the counter-based stream rooted at `key`.
/// Equals the splitmix64 sequence seeded at `key`, which makes the
/// draws for consecutive indices computable in parallel lanes.
inline std::uint64_t stream_draw(std::uint64_t key, std::uint64_t index) {
    return mix64(key + (index + 1) * kGamma);
}

} // namespace treequery::hash
