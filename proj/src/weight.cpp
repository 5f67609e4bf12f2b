#include "psv/weight.hpp"

#include <cmath>
#include <stdexcept>

#include "psv/quadrature.hpp"

namespace psv {
namespace {

const double g16_nodes_half[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
const double g16_weights_half[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

const double g8_nodes_half[4] = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363,
};
const double g8_weights_half[4] = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763,
};

std::array<double, 16> expand_nodes(const double* half) {
    std::array<double, 16> out{};
    for (int i = 0; i < 8; ++i) {
        out[i] = -half[7 - i];
        out[8 + i] = half[i];
    }
    return out;
}
std::array<double, 16> expand_weights(const double* half) {
    std::array<double, 16> out{};
    for (int i = 0; i < 8; ++i) {
        out[i] = half[7 - i];
        out[8 + i] = half[i];
    }
    return out;
}

// 1-D cell average of |x|^b over [-h/2, h/2]; for non-integrable b the
// half-cell distance value stands in (lattice regularization, flagged by
// the divergence heuristics downstream rather than hidden).
double power_cell_average_1d(double b, double h) {
    if (b > -1.0) return std::pow(0.5 * h, b) / (b + 1.0);
    return std::pow(0.5 * h, b);
}

// radial |x|^b averaged over the origin cell by 16-point tensor Gauss
double power_cell_average_radial(double b, double h, int dim) {
    static const auto nodes = expand_nodes(g16_nodes_half);
    static const auto weights = expand_weights(g16_weights_half);
    const double half = 0.5 * h;
    double acc = 0.0;
    if (dim == 2) {
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                const double x = half * nodes[i], y = half * nodes[j];
                acc += weights[i] * weights[j] * std::pow(x * x + y * y, 0.5 * b);
            }
        return acc / 4.0;  // weights integrate to 2 per axis
    }
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            for (int k = 0; k < 16; ++k) {
                const double x = half * nodes[i], y = half * nodes[j], z = half * nodes[k];
                acc += weights[i] * weights[j] * weights[k] *
                       std::pow(x * x + y * y + z * z, 0.5 * b);
            }
    return acc / 8.0;
}

std::vector<double> power_node_values(double b, const SpectralGrid& g) {
    std::vector<double> out(g.size());
    const std::size_t total = g.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        auto s = g.unflatten(idx);
        double r2 = 0.0;
        bool at_origin = true;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.coord(s[a]);
            r2 += x * x;
            at_origin = at_origin && (x == 0.0);
        }
        if (at_origin && b != 0.0) {
            out[idx] = g.dim == 1 ? power_cell_average_1d(b, g.spacing)
                                  : power_cell_average_radial(b, g.spacing, g.dim);
        } else {
            out[idx] = std::pow(r2, 0.5 * b);
        }
    }
    return out;
}

std::vector<double> product_node_values(const std::vector<double>& axis_b, const SpectralGrid& g) {
    std::vector<double> out(g.size(), 1.0);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        auto s = g.unflatten(idx);
        double v = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.coord(s[a]);
            const double ba = axis_b[a];
            if (x == 0.0 && ba != 0.0)
                v *= power_cell_average_1d(ba, g.spacing);
            else
                v *= std::pow(std::abs(x), ba);
        }
        out[idx] = v;
    }
    return out;
}

} // namespace

const GaussRule& gauss8() {
    static const auto nodes = [] {
        std::array<double, 8> out{};
        for (int i = 0; i < 4; ++i) {
            out[i] = -g8_nodes_half[3 - i];
            out[4 + i] = g8_nodes_half[i];
        }
        return out;
    }();
    static const auto weights = [] {
        std::array<double, 8> out{};
        for (int i = 0; i < 4; ++i) {
            out[i] = g8_weights_half[3 - i];
            out[4 + i] = g8_weights_half[i];
        }
        return out;
    }();
    static const GaussRule r{nodes.data(), weights.data(), 8};
    return r;
}

const GaussRule& gauss16() {
    static const auto nodes = expand_nodes(g16_nodes_half);
    static const auto weights = expand_weights(g16_weights_half);
    static const GaussRule r{nodes.data(), weights.data(), 16};
    return r;
}

double Weight::eval(std::span<const double> x) const {
    switch (kind) {
        case Kind::unit:
            return 1.0;
        case Kind::power: {
            double r2 = 0.0;
            for (double xi : x) r2 += xi * xi;
            return std::pow(r2, 0.5 * b);
        }
        case Kind::power_product: {
            double v = 1.0;
            for (std::size_t a = 0; a < x.size(); ++a) v *= std::pow(std::abs(x[a]), axis_b[a]);
            return v;
        }
        case Kind::custom:
            return fn(x);
    }
    return 1.0;
}

bool Weight::is_singular() const {
    switch (kind) {
        case Kind::unit:
            return false;
        case Kind::power:
            return b != 0.0;
        case Kind::power_product:
            for (double ba : axis_b)
                if (ba != 0.0) return true;
            return false;
        case Kind::custom:
            return false;  // probed at nodes instead
    }
    return false;
}

Weight unit_weight() { return Weight{}; }

Weight power_weight(double b) {
    Weight w;
    w.kind = Weight::Kind::power;
    w.b = b;
    return w;
}

Weight power_product_weight(std::vector<double> axis_b) {
    Weight w;
    w.kind = Weight::Kind::power_product;
    w.axis_b = std::move(axis_b);
    return w;
}

Weight custom_weight(std::function<double(std::span<const double>)> fn) {
    Weight w;
    w.kind = Weight::Kind::custom;
    w.fn = std::move(fn);
    return w;
}

std::vector<double> weight_node_values(const Weight& w, const SpectralGrid& g) {
    switch (w.kind) {
        case Weight::Kind::unit:
            return std::vector<double>(g.size(), 1.0);
        case Weight::Kind::power:
            return power_node_values(w.b, g);
        case Weight::Kind::power_product: {
            std::vector<double> bs = w.axis_b;
            bs.resize(g.dim, 0.0);
            return product_node_values(bs, g);
        }
        case Weight::Kind::custom: {
            std::vector<double> out(g.size());
            std::array<double, 3> x{};
            for (std::size_t idx = 0; idx < g.size(); ++idx) {
                auto s = g.unflatten(idx);
                for (int a = 0; a < g.dim; ++a) x[a] = g.coord(s[a]);
                const double v = w.fn(std::span<const double>(x.data(), g.dim));
                if (!std::isfinite(v))
                    throw std::invalid_argument(
                        "weight_node_values: custom weight not finite at a node and no "
                        "cell-average rule applies");
                out[idx] = v;
            }
            return out;
        }
    }
    return {};
}

std::vector<double> dual_weight_node_values(const Weight& w, double p, const SpectralGrid& g) {
    if (!(p > 1.0)) throw std::invalid_argument("dual weight needs p > 1");
    const double dual_exp = -1.0 / (p - 1.0);
    switch (w.kind) {
        case Weight::Kind::unit:
            return std::vector<double>(g.size(), 1.0);
        case Weight::Kind::power:
            return power_node_values(w.b * dual_exp, g);
        case Weight::Kind::power_product: {
            std::vector<double> bs = w.axis_b;
            bs.resize(g.dim, 0.0);
            for (double& ba : bs) ba *= dual_exp;
            return product_node_values(bs, g);
        }
        case Weight::Kind::custom: {
            auto vals = weight_node_values(w, g);
            for (double& v : vals) {
                if (v <= 0.0)
                    throw std::invalid_argument("dual weight: custom weight must be positive");
                v = std::pow(v, dual_exp);
            }
            return vals;
        }
    }
    return {};
}

} // namespace psv
