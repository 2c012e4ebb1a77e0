#pragma once

#include <cstdint>

namespace treequery::kernel {

/// Fixed-point flip threshold for an error probability in [0, 1].
/// A seat flips its answer when the top 53 bits of its draw fall below
/// the threshold, so the flip probability matches `alpha` to within 2^-53.
std::uint64_t flip_threshold(double alpha);

/// Whether seat `seat` of the panel keyed by `key` flips its answer.
/// Single-seat reference used by the per-expert query path; must agree
/// bit-exactly with the counting kernels below.
bool seat_flip(std::uint64_t key, int seat, std::uint64_t threshold);

/// Number of flipped seats among seats [0, m). Scalar reference kernel.
int count_flips_scalar(std::uint64_t key, int m, std::uint64_t threshold);

#if defined(__x86_64__) || defined(_M_X64)
/// AVX2 variant of count_flips_scalar; four seats per lane step.
/// Compiled in its own translation unit with -mavx2 and only ever called
/// after a runtime CPU check.
int count_flips_avx2(std::uint64_t key, int m, std::uint64_t threshold);
#endif

/// Runtime-dispatched count of flipped seats; picks the widest variant
/// the CPU supports, falling back to the scalar kernel.
int count_flips(std::uint64_t key, int m, std::uint64_t threshold);

/// Name of the variant count_flips dispatches to ("avx2" or "scalar").
const char* active_implementation();

} // namespace treequery::kernel
