#include <cmath>
#include <vector>

#include "doctest.h"
#include "psv/grid.hpp"
#include "psv/symbol.hpp"

using psv::cplx;

TEST_CASE("builtin symbols declare validated constants") {
    auto g = psv::make_grid(1, 256, 16.0);

    SUBCASE("heat") {
        auto s = psv::fractional_laplacian_symbol(2.0);
        CHECK(s.order == 2.0);
        CHECK(s.kappa == 1.0);
        CHECK(s.bound_m == 1.0);
        double xi = 3.0;
        CHECK(s(0.0, std::span<const double>(&xi, 1)).real() == doctest::Approx(-9.0));
    }

    SUBCASE("second order scalar bounds") {
        auto s = psv::second_order_symbol(1, {{1.0}, {3.0}}, {0.0, 1.0, 2.0}, 1.0, 3.0);
        CHECK(s.kappa == 1.0);
        CHECK(s.bound_m == 3.0);
        double xi = 1.0;
        CHECK(s(0.5, std::span<const double>(&xi, 1)).real() == doctest::Approx(-1.0));
        CHECK(s(1.5, std::span<const double>(&xi, 1)).real() == doctest::Approx(-3.0));
        CHECK(s(9.0, std::span<const double>(&xi, 1)).real() == doctest::Approx(-3.0));
    }

    SUBCASE("second order rejects out-of-bound coefficients") {
        CHECK_THROWS_AS((void)psv::second_order_symbol(1, {{5.0}}, {0.0, 1.0}, 1.0, 3.0),
                        std::invalid_argument);
    }

    SUBCASE("oscillating complex") {
        auto s = psv::oscillating_complex_symbol(1.0, 0.5);
        double xi = 2.0;
        auto v = s(0.0, std::span<const double>(&xi, 1));
        CHECK(v.real() == doctest::Approx(-2.0));
        CHECK(v.imag() == doctest::Approx(-1.0));
        auto rep = psv::check_ellipticity(s, g, std::vector<double>{0.0});
        CHECK(rep.min_ellipticity_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("every builtin passes ellipticity with its declared kappa") {
        std::vector<psv::Symbol> symbols;
        symbols.push_back(psv::fractional_laplacian_symbol(1.0));
        symbols.push_back(psv::fractional_laplacian_symbol(2.0));
        symbols.push_back(psv::second_order_symbol(1, {{1.0}, {3.0}}, {0.0, 1.0, 2.0}, 1.0, 3.0));
        symbols.push_back(psv::relativistic_symbol(1.5, 1e-2));
        symbols.push_back(psv::oscillating_complex_symbol(1.0, 0.5));
        for (const auto& s : symbols) {
            auto rep = psv::check_ellipticity(s, g, s.default_time_samples(2.0));
            CHECK(rep.elliptic_verdict);
        }
    }
}

TEST_CASE("check_ellipticity ratios") {
    auto g = psv::make_grid(1, 256, 16.0);

    SUBCASE("heat ratio is exactly one") {
        auto rep = psv::check_ellipticity(psv::fractional_laplacian_symbol(2.0), g,
                                          std::vector<double>{0.0, 1.0});
        CHECK(rep.min_ellipticity_ratio == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("piecewise damped symbol reports the worst piece") {
        psv::Symbol s = psv::fractional_laplacian_symbol(2.0);
        s.partition = {0.0, 1.0, 2.0};
        s.evaluate = [](double t, std::span<const double> xi) {
            const double a = t < 1.0 ? 0.5 : 1.5;  // in [0.5, 1.5]
            return cplx(-a * xi[0] * xi[0], 0.0);
        };
        s.kappa = 0.5;
        auto rep = psv::check_ellipticity(s, g, s.default_time_samples(2.0));
        CHECK(rep.min_ellipticity_ratio == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rep.elliptic_verdict);
    }

    SUBCASE("anti-dissipative symbol fails with ratio -1") {
        psv::Symbol s = psv::fractional_laplacian_symbol(2.0);
        s.evaluate = [](double, std::span<const double> xi) {
            return cplx(xi[0] * xi[0], 0.0);
        };
        auto rep = psv::check_ellipticity(s, g, std::vector<double>{0.0});
        CHECK(rep.min_ellipticity_ratio == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK_FALSE(rep.elliptic_verdict);
    }
}

TEST_CASE("regular upper bound ratios by finite differences") {
    auto g = psv::make_grid(1, 256, 16.0);

    SUBCASE("heat derivatives match analytic values") {
        auto rep = psv::check_regular_upper_bound(psv::fractional_laplacian_symbol(2.0), 2, g,
                                                  std::vector<double>{0.0});
        CHECK(rep.max_derivative_ratios.at(0) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.max_derivative_ratios.at(1) == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(rep.max_derivative_ratios.at(2) == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(rep.upper_bound_verdict);
    }

    SUBCASE("|xi| has unit first-derivative ratio") {
        auto rep = psv::check_regular_upper_bound(psv::fractional_laplacian_symbol(1.0), 1, g,
                                                  std::vector<double>{0.0});
        CHECK(rep.max_derivative_ratios.at(1) == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("order zero reduces to the homogeneity bound") {
        auto s = psv::oscillating_complex_symbol(1.0, 0.5);
        auto rep = psv::check_regular_upper_bound(s, 0, g, std::vector<double>{0.0});
        CHECK(rep.max_derivative_ratios.at(0) ==
              doctest::Approx(std::sqrt(1.25)).epsilon(1e-10));
    }
}

TEST_CASE("required order from the regularity constant") {
    // unit weight: R = 2 for every p
    for (int d : {1, 2, 3}) CHECK(psv::required_order(2.0, d) == d / 2 + 2);
    // |x|^{1/2}, p = 2, d = 1: R = 4/3, matches floor((b+d)/p) + 2 = 2
    CHECK(psv::required_order(4.0 / 3.0, 1) == 2);
    // |x|^1, p = 2, d = 2: R = 4/3, n = floor(1.5) + 2 = 3
    CHECK(psv::required_order(4.0 / 3.0, 2) == 3);
    CHECK_THROWS_AS((void)psv::required_order(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)psv::required_order(2.5, 1), std::invalid_argument);
}

TEST_CASE("ellipticity ratio is dilation covariant") {
    auto g = psv::make_grid(1, 256, 16.0);
    for (double lambda : {2.0, 4.0}) {
        auto base = psv::oscillating_complex_symbol(1.5, 0.3);
        psv::Symbol scaled = base;
        scaled.evaluate = [base, lambda](double t, std::span<const double> xi) {
            std::vector<double> y(xi.begin(), xi.end());
            for (auto& v : y) v *= lambda;
            return base(t, y) / std::pow(lambda, base.order);
        };
        auto r0 = psv::check_ellipticity(base, g, std::vector<double>{0.0});
        auto r1 = psv::check_ellipticity(scaled, g, std::vector<double>{0.0});
        CHECK(std::abs(r0.min_ellipticity_ratio - r1.min_ellipticity_ratio) <= 1e-12);
    }
}

TEST_CASE("declared kappa above one is normalized by a time rescale") {
    auto s = psv::second_order_symbol(1, {{2.0}, {3.0}}, {0.0, 1.0, 2.0}, 2.0, 3.0);
    CHECK(s.kappa == 1.0);
    CHECK(s.time_rescale == 2.0);
    // piece boundary moved to the rescaled clock; values divided by c
    double xi = 1.0;
    CHECK(s(0.5, std::span<const double>(&xi, 1)).real() == doctest::Approx(-1.0));
    CHECK(s(3.0, std::span<const double>(&xi, 1)).real() == doctest::Approx(-1.5));
    auto g = psv::make_grid(1, 256, 16.0);
    auto rep = psv::check_ellipticity(s, g, s.default_time_samples(4.0));
    CHECK(rep.elliptic_verdict);
    CHECK(rep.time_rescale == 2.0);
}
