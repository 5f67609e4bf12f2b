#include "psv/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psv {

SpectralGrid make_grid(int dim, int points_per_axis, double half_width) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("make_grid: dim must be 1, 2, or 3");
    const int n = points_per_axis;
    if (n < 64 || (n & (n - 1)) != 0)
        throw std::invalid_argument("make_grid: points_per_axis must be a power of two >= 64");
    if (!(half_width > 0.0)) throw std::invalid_argument("make_grid: half_width must be positive");

    SpectralGrid g;
    g.dim = dim;
    g.n = n;
    g.half_width = half_width;
    g.spacing = 2.0 * half_width / n;
    g.freq_step = M_PI / half_width;
    g.nyquist = M_PI * n / (2.0 * half_width);
    g.band_lo = static_cast<int>(std::ceil(std::log2(g.freq_step))) + 1;
    g.band_hi = static_cast<int>(std::floor(std::log2(g.nyquist))) - 1;
    if (g.band_hi - g.band_lo < 3)
        throw std::invalid_argument("make_grid: resolved dyadic band narrower than 3 levels (got [" +
                                    std::to_string(g.band_lo) + ", " + std::to_string(g.band_hi) +
                                    "])");
    return g;
}

} // namespace psv
