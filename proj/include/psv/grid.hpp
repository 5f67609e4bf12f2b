#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace psv {

// Periodic grid on [-L, L)^dim with N nodes per axis, N a power of two.
// Nodes x_m = -L + m*h; frequencies xi_k = (pi/L)*k for k in [-N/2, N/2).
// The resolved dyadic band [band_lo, band_hi] is the range of Littlewood-
// Paley levels whose annuli fit strictly inside the frequency lattice.
struct SpectralGrid {
    int dim = 1;
    int n = 0;                // points per axis
    double half_width = 0.0;  // L
    double spacing = 0.0;     // h = 2L/N
    double freq_step = 0.0;   // pi/L
    double nyquist = 0.0;     // pi*N/(2L)
    int band_lo = 0;
    int band_hi = 0;

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
        return s;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing;
        return v;
    }
    double freq_cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= freq_step;
        return v;
    }

    // axis coordinate of node index m in [0, n)
    double coord(int m) const { return -half_width + spacing * m; }
    // signed frequency index of DFT slot i in [0, n)
    int signed_index(int i) const { return i < n / 2 ? i : i - n; }
    double freq_of_slot(int i) const { return freq_step * signed_index(i); }

    // decompose flat row-major index into per-axis slots
    std::array<int, 3> unflatten(std::size_t idx) const {
        std::array<int, 3> out{0, 0, 0};
        for (int a = dim - 1; a >= 0; --a) {
            out[a] = static_cast<int>(idx % static_cast<std::size_t>(n));
            idx /= static_cast<std::size_t>(n);
        }
        return out;
    }

    // |xi|^2 at flat spectral index
    double freq_norm2(std::size_t idx) const {
        auto s = unflatten(idx);
        double acc = 0.0;
        for (int a = 0; a < dim; ++a) {
            double f = freq_of_slot(s[a]);
            acc += f * f;
        }
        return acc;
    }

    bool operator==(const SpectralGrid&) const = default;
};

// Validates dim in {1,2,3}, N a power of two >= 64, L > 0, and a resolved
// band at least 3 levels wide. Throws std::invalid_argument otherwise.
SpectralGrid make_grid(int dim, int points_per_axis, double half_width);

} // namespace psv
