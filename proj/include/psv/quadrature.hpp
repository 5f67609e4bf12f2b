#pragma once

#include <array>
#include <cstddef>

// Gauss-Legendre rules used across the project: 8-point for symbol time
// integrals, 16-point for measure quadratures and singular-cell averages.

namespace psv {

struct GaussRule {
    const double* nodes;    // on [-1, 1]
    const double* weights;
    std::size_t size;
};

const GaussRule& gauss8();
const GaussRule& gauss16();

// integral of f over [a, b] with the given rule
template <class F>
double gauss_integrate(const GaussRule& r, double a, double b, const F& f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size; ++i) acc += r.weights[i] * f(mid + half * r.nodes[i]);
    return acc * half;
}

} // namespace psv
