#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "psv/grid.hpp"
#include "psv/weight.hpp"

namespace psv {

using cplx = std::complex<double>;

// A complex field on the periodic grid together with its discrete Fourier
// coefficients under the symmetric normalization
//   F(xi_k) = h^d (2pi)^{-d/2} sum_m e^{-i xi_k . x_m} f(x_m),
//   f(x_m)  = (pi/L)^d (2pi)^{-d/2} sum_k e^{ i xi_k . x_m} F(xi_k).
// Both representations are kept consistent; fields are immutable after
// construction.
class SpectralField {
  public:
    static SpectralField from_values(const SpectralGrid& g, std::vector<cplx> values);
    static SpectralField from_spectrum(const SpectralGrid& g, std::vector<cplx> spectrum);

    const SpectralGrid& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return values_; }
    const std::vector<cplx>& spectrum() const { return spectrum_; }

    // field with spectrum multiplied pointwise by mult (same lattice order)
    SpectralField multiplied(const std::vector<cplx>& mult) const;

    // discrete L2 norms of each representation (they agree by Parseval)
    double l2_values() const;
    double l2_spectrum() const;

  private:
    SpectralField(SpectralGrid g, std::vector<cplx> v, std::vector<cplx> s)
        : grid_(g), values_(std::move(v)), spectrum_(std::move(s)) {}

    SpectralGrid grid_;
    std::vector<cplx> values_;
    std::vector<cplx> spectrum_;
};

// (sum_m w(x_m) |f(x_m)|^p h^d)^{1/p}; w = nullopt means unweighted.
// Rejects p < 1. Singular power weights use the origin-cell average rule.
double weighted_lp_norm(const SpectralField& f, double p, const std::optional<Weight>& w);

// Same, with a pretabulated weight (avoids retabulating in norm sweeps).
double weighted_lp_norm(const SpectralField& f, double p, const std::vector<double>& w_nodes);
double weighted_lp_norm_values(const SpectralGrid& g, const std::vector<cplx>& values, double p,
                               const std::vector<double>& w_nodes);

// raw little-endian interleaved (re,im) doubles + JSON sidecar
void dump_field(const SpectralField& f, const std::string& path, bool spectrum_kind);

} // namespace psv
