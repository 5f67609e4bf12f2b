#pragma once

#include <functional>
#include <vector>

#include "psv/field.hpp"
#include "psv/grid.hpp"
#include "psv/measure.hpp"
#include "psv/weight.hpp"

namespace psv {

// Littlewood-Paley frame on the grid lattice. The radial cutoff chi equals
// one on |xi| <= 1, zero on |xi| >= 2, with the smooth bump-quotient
// transition h(s) = phi(s)/(phi(s)+phi(1-s)), phi(s) = e^{-1/s}. Block
// multipliers are the differences chi(2^{-j} xi) - chi(2^{-j+1} xi), so the
// ladder telescopes identically; negative rounding residue is clamped to 0.
// The tabulated ladder extends past the resolved band so that the full sum
// equals 1 at every nonzero lattice frequency.
class LPFrame {
  public:
    explicit LPFrame(const SpectralGrid& g);

    const SpectralGrid& grid() const { return grid_; }
    int ladder_lo() const { return ladder_lo_; }
    int ladder_hi() const { return ladder_hi_; }
    int band_lo() const { return grid_.band_lo; }
    int band_hi() const { return grid_.band_hi; }
    // effective low/high split for inhomogeneous norms: 0 when resolved,
    // else the bottom of the band (recorded in norm reports)
    int split_level() const { return split_level_; }

    static double chi(double r);

    const std::vector<double>& block(int j) const;       // multiplier table
    std::vector<double> low_pass(int j0) const;          // chi(2^{-j0} xi) table

    SpectralField project(const SpectralField& f, int j) const;
    SpectralField low_projection(const SpectralField& f, int j0) const;
    // 2^{scale} * block-projection in one multiplier pass
    SpectralField project_scaled(const SpectralField& f, int j, double scale_log2) const;

  private:
    SpectralGrid grid_;
    int ladder_lo_ = 0, ladder_hi_ = 0, split_level_ = 0;
    std::vector<std::vector<double>> blocks_;
    std::vector<double> radius_;  // |xi| per lattice slot
};

struct NormSpec {
    enum class Flavor { bessel, besov };
    double p = 2.0;
    double q = 2.0;
    Flavor flavor = Flavor::bessel;
    bool homogeneous = false;
    DyadicSequence smoothness;  // must cover the resolved band
    Weight weight;
};

struct NormResult {
    double value = 0.0;
    int split_level = 0;  // low/high split actually used (inhomogeneous)
};

NormResult space_norm_detailed(const LPFrame& frame, const SpectralField& f, const NormSpec& spec);
// variant with a pretabulated weight table (norm sweeps along trajectories)
NormResult space_norm_detailed(const LPFrame& frame, const SpectralField& f, const NormSpec& spec,
                               const std::vector<double>& w_tab);
double space_norm(const LPFrame& frame, const SpectralField& f, const NormSpec& spec);

// || (1 - Laplacian)^{s/2} f ||_{L_p(w)} via the (1+|xi|^2)^{s/2} multiplier
double classical_bessel_norm(const SpectralField& f, double s, double p, const Weight& w);

// pointwise (sum_{j in band} |Delta_j f|^2)^{1/2} as a node table
std::vector<double> square_function(const LPFrame& frame, const SpectralField& f);

// multiplier sum_j 2^{r(j)} F[Psi](2^{-j} xi) over the resolved band
// (+ low pass below the split level when inhomogeneous); rejects sequences
// whose 2^{r} overflows
SpectralField lift(const LPFrame& frame, const SpectralField& f, const DyadicSequence& r,
                   bool homogeneous);

// exact inverse of lift on the span of the band multipliers (reciprocal
// multiplier where it is positive, zero outside); the -r lift is only an
// equivalence, adjacent transition blocks do not cancel pointwise
SpectralField lift_inverse(const LPFrame& frame, const SpectralField& f, const DyadicSequence& r,
                           bool homogeneous);

// sup over dyadic R in the resolved band and |alpha| <= dim of
// (R^{2|alpha|-d} int_{R<|xi|<2R} |D^alpha pi|^2 dxi)^{1/2}, annulus
// integrals as lattice sums, derivatives by central differences
double mikhlin_constant(const std::function<cplx(std::span<const double>)>& multiplier,
                        const SpectralGrid& g);

} // namespace psv
