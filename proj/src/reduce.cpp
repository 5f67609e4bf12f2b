#include "psv/reduce.hpp"

#include "psv/simd/kernels.hpp"

namespace psv {
namespace {

template <class Leaf>
double pairwise(std::size_t lo, std::size_t hi, const Leaf& leaf) {
    if (hi - lo <= kReduceLeaf) return leaf(lo, hi - lo);
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise(lo, mid, leaf) + pairwise(mid, hi, leaf);
}

} // namespace

double pairwise_sum(std::span<const double> v) {
    const auto& k = simd::active_kernels();
    return pairwise(0, v.size(),
                    [&](std::size_t o, std::size_t n) { return k.real_sum(v.data() + o, n); });
}

double pairwise_abs2_sum(std::span<const std::complex<double>> z) {
    const auto& k = simd::active_kernels();
    return pairwise(0, z.size(),
                    [&](std::size_t o, std::size_t n) { return k.abs2_sum(z.data() + o, n); });
}

double pairwise_weighted_abs2_sum(std::span<const double> w,
                                  std::span<const std::complex<double>> z) {
    const auto& k = simd::active_kernels();
    return pairwise(0, z.size(), [&](std::size_t o, std::size_t n) {
        return k.weighted_abs2_sum(w.data() + o, z.data() + o, n);
    });
}

} // namespace psv
