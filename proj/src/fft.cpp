#include "psv/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace psv {
namespace {

// FFTW planning is not thread-safe; execution via fftw_execute_dft on
// distinct buffers is. Plans are created unaligned so they can run on any
// heap buffer.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int dim, int n, int sign) {
        std::lock_guard<std::mutex> lock(mtx_);
        auto key = std::make_tuple(dim, n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::size_t total = 1;
        std::vector<int> dims(dim, n);
        for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
        std::vector<std::complex<double>> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft(dim, dims.data(), buf, buf, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

  private:
    PlanCache() = default;
    std::mutex mtx_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

} // namespace

void dft_forward(const SpectralGrid& g, std::complex<double>* inout) {
    fftw_plan p = PlanCache::instance().get(g.dim, g.n, FFTW_FORWARD);
    auto* buf = reinterpret_cast<fftw_complex*>(inout);
    fftw_execute_dft(p, buf, buf);
}

void dft_backward(const SpectralGrid& g, std::complex<double>* inout) {
    fftw_plan p = PlanCache::instance().get(g.dim, g.n, FFTW_BACKWARD);
    auto* buf = reinterpret_cast<fftw_complex*>(inout);
    fftw_execute_dft(p, buf, buf);
}

} // namespace psv
