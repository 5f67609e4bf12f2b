#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops of the spectral core: complex multiplier
// application and magnitude reductions over frequency/space lattices.
// A scalar reference implementation always exists; an AVX2 variant is
// selected at runtime when the CPU supports it. Both variants accumulate
// in a fixed shape, so a given binary on a given machine produces
// bit-identical results regardless of thread count.

namespace psv::simd {

using cplx = std::complex<double>;

struct Kernels {
    const char* name;

    // dst[i] = a[i] * b[i]
    void (*cmul)(cplx* dst, const cplx* a, const cplx* b, std::size_t n);
    // dst[i] *= b[i]
    void (*cmul_inplace)(cplx* dst, const cplx* b, std::size_t n);
    // dst[i] = a[i] * s
    void (*cscale)(cplx* dst, const cplx* a, cplx s, std::size_t n);
    // dst[i] += |z[i]|^2
    void (*abs2_accum)(double* dst, const cplx* z, std::size_t n);
    // sum_i |z[i]|^2 over one leaf block
    double (*abs2_sum)(const cplx* z, std::size_t n);
    // sum_i w[i] * |z[i]|^2 over one leaf block
    double (*weighted_abs2_sum)(const double* w, const cplx* z, std::size_t n);
    // sum_i v[i] over one leaf block (real data)
    double (*real_sum)(const double* v, std::size_t n);
};

const Kernels& scalar_kernels();

// AVX2 variant, or nullptr on CPUs/builds without it.
const Kernels* avx2_kernels();

// Runtime-selected kernels. Honors PSV_SIMD=scalar|avx2 for forcing a
// variant (used by the equivalence tests); decided once per process.
const Kernels& active_kernels();

} // namespace psv::simd
