#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Deterministic lattice reductions. Leaves of a fixed-shape pairwise tree
// are summed by the active SIMD kernel; the tree shape depends only on the
// array length, never on thread count, so sums are reproducible bit for bit
// within one process configuration.

namespace psv {

inline constexpr std::size_t kReduceLeaf = 1024;

double pairwise_sum(std::span<const double> v);
double pairwise_abs2_sum(std::span<const std::complex<double>> z);
double pairwise_weighted_abs2_sum(std::span<const double> w,
                                  std::span<const std::complex<double>> z);

} // namespace psv
