#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "psv/grid.hpp"
#include "psv/weight.hpp"

namespace psv {

using cplx = std::complex<double>;

// Dyadic window family on the periodic lattice: half-widths 2^l nodes,
// l = l_min .. log2(N) - 2, every node a candidate center (wrap-around).
struct BallFamily {
    std::vector<int> radii_nodes;
};
BallFamily dyadic_ball_family(const SpectralGrid& g, int l_min = 0, int l_max = -1);

// Sampled Muckenhoupt product sup_B (avg_B w)(avg_B w^{-1/(p-1)})^{p-1}
// over cubes of the family; a lower bound of the true constant. per_radius
// holds the per-half-width maxima used by the divergence heuristic.
struct ApEstimate {
    double estimate = 0.0;
    std::vector<int> radii_nodes;
    std::vector<double> per_radius;
    // ratio between the extreme per-radius estimates (max/min orientation-free)
    double divergence_ratio = 1.0;
};
ApEstimate ap_constant_estimate(const Weight& w, double p, const SpectralGrid& g,
                                const BallFamily& family);

// Regularity constant R = sup{p0 in (1,2] : w in A_{p/p0}}.
// Power weights use the closed form min(2, dp/(d+b)); the bisection path is
// exposed for cross-validation and for custom weights, where membership is
// decided by the divergence heuristic (ratio > 4 across the radius ladder
// means not in class, [2,4] undecided).
struct RegularityResult {
    double r = 2.0;
    bool undecided = false;
    int order = 2;                  // floor(d/R) + 2
    std::optional<int> alt_order;   // reported near floor breakpoints
};
double regularity_constant_closed_form(double b, double p, int dim);
RegularityResult regularity_constant(const Weight& w, double p, const SpectralGrid& g);
RegularityResult regularity_constant_bisect(
    const Weight& w, double p, const SpectralGrid& g,
    const std::function<int(double)>& membership);  // 1 in, 0 out, -1 undecided
// heuristic membership functor backed by ap_constant_estimate
std::function<int(double)> heuristic_membership(const Weight& w, const SpectralGrid& g);

// Hardy-Littlewood maximal function over centered cubes of every integer
// half-width up to N/4 (plus the node itself), via circular sliding sums
// and max filters. Returns a node table.
std::vector<double> maximal_function(const SpectralGrid& g, const std::vector<cplx>& values);

// Fefferman-Stein sharp function in the single-average oscillation form
// sup_W avg_W |f - avg_W f| over dyadic cube half-widths. Centers are
// exhaustive in 1-D and strided in 2-D/3-D (sampled supremum).
std::vector<double> sharp_function(const SpectralGrid& g, const std::vector<cplx>& values);

// (sum_m w_m |table_m|^p h^d)^{1/p} for real node tables
double table_lp_norm(const SpectralGrid& g, const std::vector<double>& table, double p,
                     const std::vector<double>& w_nodes);

} // namespace psv
