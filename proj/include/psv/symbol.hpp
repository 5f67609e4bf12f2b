#pragma once

#include <complex>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "psv/grid.hpp"

namespace psv {

using cplx = std::complex<double>;

// Time-measurable symbol psi(t, xi) of order gamma with declared constants
// (kappa, M): Re[-psi] >= kappa |xi|^gamma and |psi| <= M |xi|^gamma. The
// constants are declared then validated, never inferred. Time dependence is
// either piecewise constant on a finite partition (integrals in t are then
// exact piece sums) or a smooth callable quadratured per subinterval.
struct Symbol {
    double order = 2.0;   // gamma > 0
    double kappa = 1.0;   // in (0, 1] after normalization
    double bound_m = 1.0; // M
    bool piecewise_constant_in_time = true;
    std::vector<double> partition{0.0};  // 0 = t0 < t1 < ... < tK; last piece extends past tK
    std::function<cplx(double, std::span<const double>)> evaluate;
    // when a declared kappa > 1 is normalized away, time is rescaled by this
    // factor and the report records it
    double time_rescale = 1.0;
    std::string kind = "custom";

    cplx operator()(double t, std::span<const double> xi) const { return evaluate(t, xi); }

    // representative times: piece midpoints plus endpoints
    std::vector<double> default_time_samples(double horizon) const;
};

Symbol fractional_laplacian_symbol(double gamma);
// a(t) piecewise constant: pieces[k] is the symmetric coefficient matrix
// (row-major dim x dim) on [partition[k], partition[k+1]); validates the
// two-sided bound kappa|xi|^2 <= a^{ij} xi^i xi^j <= M|xi|^2 on sampled
// directions and throws on violation.
Symbol second_order_symbol(int dim, std::vector<std::vector<double>> pieces,
                           std::vector<double> partition, double kappa, double m);
// -(1+|xi|^2)^{gamma/2} + 1; elliptic on |xi| >= xi_min with the computed
// kappa (the bound degenerates as xi -> 0 for gamma < 2)
Symbol relativistic_symbol(double gamma, double xi_min = 1e-2);
// -(1 + i rho)|xi|^gamma
Symbol oscillating_complex_symbol(double gamma, double rho);

// Normalizes declared kappa > 1 by rescaling time (psi/kappa on the scaled
// clock); identity when kappa <= 1 already.
Symbol normalized(Symbol s);

struct SymbolReport {
    double min_ellipticity_ratio = 0.0;           // min Re[-psi]/|xi|^gamma
    std::map<int, double> max_derivative_ratios;   // per |alpha|
    double implied_upper_m = 0.0;                  // max ratio over all orders
    std::size_t samples_used = 0;
    bool elliptic_verdict = false;
    bool upper_bound_verdict = false;
    bool fd_conditioning_warning = false;
    double time_rescale = 1.0;
};

// min over lattice xi != 0 and time samples; verdict compares against the
// declared kappa with relative tolerance 1e-9. Reports, never throws.
SymbolReport check_ellipticity(const Symbol& s, const SpectralGrid& g,
                               std::span<const double> time_samples);

// central finite differences, step eta = max(1e-5, 1e-5 |xi|) per axis,
// mixed partials by nested differencing, |alpha| <= min(n, 4)
SymbolReport check_regular_upper_bound(const Symbol& s, int n, const SpectralGrid& g,
                                       std::span<const double> time_samples);

// floor(dim / R) + 2 for a regularity constant R in (1, 2]
int required_order(double regularity_r, int dim);

} // namespace psv
