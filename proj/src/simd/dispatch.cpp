#include "psv/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace psv::simd {

#if defined(PSV_HAVE_AVX2_KERNELS)
const Kernels* avx2_kernels_impl();
#endif

const Kernels* avx2_kernels() {
#if defined(PSV_HAVE_AVX2_KERNELS)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_kernels_impl();
#endif
    return nullptr;
}

const Kernels& active_kernels() {
    static const Kernels* chosen = [] {
        const char* force = std::getenv("PSV_SIMD");
        if (force != nullptr) {
            if (std::strcmp(force, "scalar") == 0) return &scalar_kernels();
            if (std::strcmp(force, "avx2") == 0 && avx2_kernels() != nullptr)
                return avx2_kernels();
        }
        if (const Kernels* v = avx2_kernels()) return v;
        return &scalar_kernels();
    }();
    return *chosen;
}

} // namespace psv::simd
