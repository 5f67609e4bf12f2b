#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "psv/grid.hpp"

namespace psv {

// Spatial weight w(x). Power weights |x|^b carry closed-form A_p facts used
// as oracles; custom weights are opaque callables probed numerically.
struct Weight {
    enum class Kind { unit, power, power_product, custom };

    Kind kind = Kind::unit;
    double b = 0.0;                  // radial exponent for Kind::power
    std::vector<double> axis_b;      // per-axis exponents for power_product
    std::function<double(std::span<const double>)> fn;  // custom

    double eval(std::span<const double> x) const;
    bool is_singular() const;  // unbounded or vanishing at the origin

    // |x|^b in A_p(R^d) iff -d < b < d(p-1)
    static bool power_in_ap(double b, double p, int dim) {
        return b > -dim && b < dim * (p - 1.0);
    }
};

Weight unit_weight();
Weight power_weight(double b);
Weight power_product_weight(std::vector<double> axis_b);
Weight custom_weight(std::function<double(std::span<const double>)> fn);

// Node table of the weight with the singular-cell rule: the cell that
// contains the origin takes the analytic cell average (closed form in 1-D
// and for per-axis products, 16-point tensor Gauss per axis for radial
// powers in 2-D/3-D). Throws if a node value is not finite and no cell
// rule applies.
std::vector<double> weight_node_values(const Weight& w, const SpectralGrid& g);

// Same table for the A_p dual weight w^{-1/(p-1)}.
std::vector<double> dual_weight_node_values(const Weight& w, double p, const SpectralGrid& g);

} // namespace psv
