#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psv/field.hpp"
#include "psv/grid.hpp"
#include "psv/lp_frame.hpp"
#include "psv/symbol.hpp"

namespace psv {

// int_s^t psi(r, xi) dr: exact piece sums for piecewise-constant symbols,
// 8-point Gauss-Legendre per declared subinterval otherwise
cplx symbol_time_integral(const Symbol& sym, double s, double t, std::span<const double> xi);

// multiplier m(t,s,xi) = exp(int_s^t psi(r,xi) dr) tabulated on the lattice
std::vector<cplx> propagator_multiplier(const Symbol& sym, const SpectralGrid& g, double s,
                                        double t);

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
};

// Exact-in-spectrum evolution u_hat(t) = m(t,0,xi) u0_hat. Validates the
// ellipticity verdict once per call unless force is set (failure demos).
Trajectory solve_homogeneous(const Symbol& sym, const SpectralField& u0,
                             std::span<const double> times, bool force = false);
SpectralField solve_at(const Symbol& sym, const SpectralField& u0, double t, bool force = false);

// Duhamel solve with zero initial data: u_hat(t) = int_0^t m(t,s,xi)
// f_hat(s,xi) ds by composite 8-point Gauss-Legendre on the symbol's time
// partition refined 4x. The forcing is an arbitrary time-callable spectrum.
Trajectory solve_inhomogeneous(const Symbol& sym,
                               const std::function<SpectralField(double)>& forcing,
                               const SpectralGrid& g, std::span<const double> times,
                               bool force = false);

// psi(t, -i grad) f via the lattice multiplier
SpectralField apply_operator(const Symbol& sym, const SpectralField& f, double t);
// fractional Laplacian multiplier -|xi|^{2 sigma}
SpectralField fractional_laplacian_apply(const SpectralField& f, double sigma);

struct KernelSlice {
    double epsilon = 0.0;
    std::optional<int> j;  // nullopt = S0 slice
    int m = 0;
    std::array<int, 3> alpha{0, 0, 0};
    double t = 0.0, s = 0.0;
    SpectralField field;
};

// Delta_j (or S0) slice of |x|-side kernel (i xi)^alpha psi(t,xi)^m
// |xi|^{eps gamma} m(t,s,xi), physical (2pi)^{-d/2} normalization folded in
// so that lattice convolution against the slice is the multiplier operator
KernelSlice kernel_slice(const Symbol& sym, const LPFrame& frame, double epsilon,
                         std::optional<int> j, int m, std::array<int, 3> alpha, double t,
                         double s);

// weighted lattice L_p norm of the slice: || |x|^n slice ||_{L_p}, p may be
// infinity; moment distance is to the origin of the fundamental domain
double slice_moment_norm(const KernelSlice& slice, double n, double p);
// fraction of the p-th power mass sitting at |x| >= L/2 (truncation flag)
double slice_tail_fraction(const KernelSlice& slice, double n, double p);

struct KernelSweep {
    std::vector<double> epsilons{0.0, 1.0};
    std::vector<int> j_levels{0, 1, 2, 3, 4};
    bool include_s0 = true;
    std::vector<double> t_times_scale{0.25, 1.0, 4.0};  // t * 2^{j gamma} for block rows
    std::vector<double> s0_times{0.25, 1.0, 4.0};       // absolute t ladder for S0 rows
    std::vector<double> p_values{2.0, std::numeric_limits<double>::infinity()};
    // (n, m, alpha) rows; n = 0 rows are valid for every p, n > 0 needs p >= 2
    std::vector<std::tuple<double, int, std::array<int, 3>>> nma{
        {0.0, 0, {0, 0, 0}}, {1.0, 0, {0, 0, 0}}, {0.0, 1, {0, 0, 0}}, {0.0, 0, {1, 0, 0}}};
    double s = 0.0;
    double delta = 0.5;
};

struct KernelBoundRow {
    double epsilon;
    int j;  // INT_MIN encodes S0
    double t;
    double p;
    double n;
    int m;
    int alpha_code;  // alpha packed as a1 + 10 a2 + 100 a3
    double lhs;
    double shape;
    double log2_n_hat;
    bool tail_flagged;
    bool underflow_excluded;
};

// Block rows are summarized per (eps, p, n, m, alpha, tau) with tau the
// scaled time t 2^{j gamma}; parabolic self-similarity makes N-hat
// j-independent at fixed tau, which is what the spread measures. S0 rows get
// a log-log regression slope of the LHS against t.
struct KernelCellSummary {
    double epsilon;
    double p;
    double n;
    int m;
    int alpha_code;
    double tau;                // t * 2^{j gamma}; unused for S0 cells
    bool s0 = false;
    double max_log2_n_hat = 0.0;
    double spread_log2_n_hat = 0.0;  // over unflagged block rows at fixed tau
    double geomean_n_hat = 0.0;
    double max_over_fit = 0.0;  // max N-hat / geometric mean
    int rows_used = 0;
    double s0_slope = 0.0;  // d log(lhs) / d log(t) over the S0 t-ladder
};

struct KernelBoundReport {
    std::string normalization = "kernel slices carry (2pi)^{-d/2}; convolution = multiplier";
    double delta;
    std::vector<KernelBoundRow> rows;
    std::vector<KernelCellSummary> cells;
};

KernelBoundReport kernel_bound_report(const Symbol& sym, const LPFrame& frame,
                                      const KernelSweep& sweep);

// |LHS - RHS| / max(|LHS|, |RHS|, floor) for the weak-solution identity
// against a separable test function beta(t) phi(x); beta must vanish at the
// first and last trajectory samples. Trapezoid in t, lattice sums in x.
double weak_residual(const Symbol& sym, const Trajectory& traj, const SpectralField& phi_x,
                     const std::function<double(double)>& beta,
                     const std::function<double(double)>& beta_prime);

// smooth bump supported on (a, b), normalized to peak 1, with derivative
struct TimeBump {
    double a, b;
    double value(double t) const;
    double derivative(double t) const;
};

} // namespace psv
