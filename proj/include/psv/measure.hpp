#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace psv {

// Sequence j -> r(j) on an integer range with its controlled-difference
// seminorm sup_j |r(j+1) - r(j)|.
struct DyadicSequence {
    int j_lo = 0;
    int j_hi = -1;
    std::vector<double> vals;

    double at(int j) const { return vals.at(static_cast<std::size_t>(j - j_lo)); }
    bool covers(int lo, int hi) const { return j_lo <= lo && hi <= j_hi; }
    double diff_seminorm() const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i)
            s = std::max(s, std::abs(vals[i + 1] - vals[i]));
        return s;
    }
};

DyadicSequence linear_sequence(double slope, int j_lo, int j_hi);
DyadicSequence constant_sequence(double value, int j_lo, int j_hi);

// Borel measure on (0, infinity): a density part (power, sum of powers,
// A_infty dyadic-block pattern, or custom callable with declared endpoint
// exponent), an atomic part, and a scale c with the convention
//   int f(t) mu(c dt) = int f(t/c) mu(dt).
class TimeMeasure {
  public:
    struct Density {
        enum class Kind { none, power, power_sum, blocks, custom };
        Kind kind = Kind::none;
        double amp1 = 1.0, b1 = 0.0;  // amp1 * t^{b1}
        double amp2 = 0.0, b2 = 0.0;  // + amp2 * t^{b2}
        double v0 = 1.0, v1 = 2.0;    // block values on [2^k, 2^{k+1})
        std::function<double(double)> fn;
        double fn_endpoint = 0.0;  // e0 with rho(t) ~ t^{e0} near 0

        double eval(double t) const;
        double endpoint_exponent() const;
        bool present() const { return kind != Kind::none; }
    };

    static TimeMeasure lebesgue() { return power_density(0.0); }
    static TimeMeasure power_density(double b, double amp = 1.0);
    static TimeMeasure power_sum_density(double b1, double b2);
    static TimeMeasure ainfty_blocks(double v0, double v1);
    static TimeMeasure dirac(double t0, double mass = 1.0);
    static TimeMeasure custom_density(std::function<double(double)> fn, double endpoint_exponent);

    TimeMeasure with_scale(double c) const;
    TimeMeasure with_atom(double t0, double mass) const;
    // t^{-a0} mu(dt) materialized on the effective (scale-folded) clock
    TimeMeasure tilted(double a0) const;

    // Laplace transform of the (scaled) measure; rejects lambda <= 0 and
    // non-integrable densities. laplace_log works in the log domain so deep
    // atoms do not underflow.
    double laplace(double lambda) const;
    double laplace_log(double lambda) const;

    // mass of (s, e) under the scaled measure (atoms on boundary points of
    // half-open (s, e] count at e)
    double interval_mass(double s, double e) const;

    const Density& density() const { return density_; }
    const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
    double scale() const { return scale_; }
    bool has_density() const { return density_.present(); }

    // atom positions on the effective clock (t_i / c)
    std::vector<std::pair<double, double>> effective_atoms() const;

  private:
    Density density_;
    std::vector<std::pair<double, double>> atoms_;
    double scale_ = 1.0;
};

// gamma-dyadic Laplace control: mu(j) = gamma j a - log2 L_mu(2^{gamma j}),
// so that L_mu(2^{gamma j}) = N * 2^{j gamma a} 2^{-mu(j)} with N = 1.
struct LaplaceControl {
    double gamma = 2.0;
    double a = 0.0;
    DyadicSequence mu;
    double n_constant = 1.0;
};
LaplaceControl control_sequence(const TimeMeasure& m, double gamma, double a, int j_lo, int j_hi);

struct DoublingReport {
    double value = 0.0;
    bool infinite = false;  // some interval isolates mass (ratio above 1e12)
    int skipped = 0;        // intervals with mu(I) = mu(kI) = 0
};
DoublingReport doubling_constant(const TimeMeasure& m, double k);

struct WeakScalingReport {
    double b_k = 0.0;  // min of mu((0,theta)) / mu((0,k theta))
    double big_b_k = 0.0;
    bool verdict = false;  // 0 < b_k and B_k < 1
    int skipped = 0;
};
WeakScalingReport weak_scaling_constants(const TimeMeasure& m, double k,
                                         int samples_per_dyade = 2);

struct RatioBounds {
    double lo = 0.0;
    double hi = 0.0;
};
// bounds of L_{mu^{-a0}}(lambda) / (lambda^{a0} mu((0,1/lambda))) over the
// ladder; requires the weak-scaling verdict and a0 in [0, -log2 B_2)
RatioBounds laplace_equivalence_check(const TimeMeasure& m, double a0,
                                      std::span<const double> lambdas);

// int_0^T g(t) t^a mu(c dt), graded panels near zero, atoms exact.
// refine halves every panel `refine` times (used by convergence pre-flights).
double weighted_time_integral(const TimeMeasure& m, double a, double c,
                              const std::function<double(double)>& g, double T, int refine = 0);

} // namespace psv
