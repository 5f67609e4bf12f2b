#include "psv/simd/kernels.hpp"

namespace psv::simd {
namespace {

void s_cmul(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void s_cmul_inplace(cplx* dst, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] *= b[i];
}

void s_cscale(cplx* dst, const cplx* a, cplx s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * s;
}

void s_abs2_accum(double* dst, const cplx* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        dst[i] += re * re + im * im;
    }
}

double s_abs2_sum(const cplx* z, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        acc += re * re + im * im;
    }
    return acc;
}

double s_weighted_abs2_sum(const double* w, const cplx* z, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double re = z[i].real(), im = z[i].imag();
        acc += w[i] * (re * re + im * im);
    }
    return acc;
}

double s_real_sum(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
}

} // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar",   s_cmul,     s_cmul_inplace,      s_cscale,
        s_abs2_accum, s_abs2_sum, s_weighted_abs2_sum, s_real_sum,
    };
    return k;
}

} // namespace psv::simd
