#include "psv/simd/kernels.hpp"

#include <immintrin.h>

// AVX2 variants. Complex arrays are interleaved (re,im) doubles, so one
// 256-bit register holds two complex values. Reductions keep two register
// accumulators that are combined lane-by-lane in a fixed order at the end;
// the tail runs scalar. The accumulation shape never depends on alignment
// or thread count.

namespace psv::simd {
namespace {

inline __m256d cmul2(__m256d a, __m256d b) {
    // (ar*br - ai*bi, ar*bi + ai*br) for both packed complex numbers
    __m256d ar = _mm256_unpacklo_pd(a, a);              // ar ar | ar ar
    __m256d ai = _mm256_unpackhi_pd(a, a);              // ai ai | ai ai
    __m256d bswap = _mm256_permute_pd(b, 0x5);          // bi br | bi br
    return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bswap));
}

void v_cmul(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    std::size_t i = 0;
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* pd = reinterpret_cast<double*>(dst);
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        _mm256_storeu_pd(pd + 2 * i, cmul2(va, vb));
    }
    for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void v_cmul_inplace(cplx* dst, const cplx* b, std::size_t n) {
    v_cmul(dst, dst, b, n);
}

void v_cscale(cplx* dst, const cplx* a, cplx s, std::size_t n) {
    std::size_t i = 0;
    const double* pa = reinterpret_cast<const double*>(a);
    double* pd = reinterpret_cast<double*>(dst);
    const __m256d vs = _mm256_setr_pd(s.real(), s.imag(), s.real(), s.imag());
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        _mm256_storeu_pd(pd + 2 * i, cmul2(va, vs));
    }
    for (; i < n; ++i) dst[i] = a[i] * s;
}

void v_abs2_accum(double* dst, const cplx* z, std::size_t n) {
    const double* pz = reinterpret_cast<const double*>(z);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(pz + 2 * i);
        __m256d sq = _mm256_mul_pd(v, v);
        __m128d lo = _mm256_castpd256_pd128(sq);
        __m128d hi = _mm256_extractf128_pd(sq, 1);
        __m128d pair = _mm_hadd_pd(lo, hi);             // |z0|^2 | |z1|^2
        __m128d cur = _mm_loadu_pd(dst + i);
        _mm_storeu_pd(dst + i, _mm_add_pd(cur, pair));
    }
    for (; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        dst[i] += re * re + im * im;
    }
}

double v_abs2_sum(const cplx* z, std::size_t n) {
    const double* pz = reinterpret_cast<const double*>(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(pz + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double out = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
    for (; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        out += re * re + im * im;
    }
    return out;
}

double v_weighted_abs2_sum(const double* w, const cplx* z, std::size_t n) {
    const double* pz = reinterpret_cast<const double*>(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(pz + 2 * i);
        __m256d sq = _mm256_mul_pd(v, v);
        // duplicate each weight across its (re,im) pair
        __m128d w2 = _mm_loadu_pd(w + i);
        __m256d vw = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
        (void)w2;
        acc = _mm256_fmadd_pd(sq, vw, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double out = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
    for (; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        out += w[i] * (re * re + im * im);
    }
    return out;
}

double v_real_sum(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double out = ((lanes[0] + lanes[2]) + (lanes[1] + lanes[3]));
    for (; i < n; ++i) out += v[i];
    return out;
}

} // namespace

const Kernels* avx2_kernels_impl() {
    static const Kernels k = {
        "avx2",     v_cmul,     v_cmul_inplace,      v_cscale,
        v_abs2_accum, v_abs2_sum, v_weighted_abs2_sum, v_real_sum,
    };
    return &k;
}

} // namespace psv::simd
