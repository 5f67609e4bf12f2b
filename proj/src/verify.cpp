#include "psv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "psv/parallel.hpp"
#include "psv/propagator.hpp"

namespace psv {
namespace {

SpectralField gaussian_data(const SpectralGrid& g, double sigma) {
    std::vector<cplx> vals(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto sl = g.unflatten(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.coord(sl[a]);
            r2 += x * x;
        }
        vals[i] = std::exp(-0.5 * r2 / (sigma * sigma));
    }
    return SpectralField::from_values(g, std::move(vals));
}

SpectralField random_band_data(const SpectralGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<cplx> spec(g.size(), cplx(0.0));
    const double lo = std::pow(2.0, g.band_lo), hi = std::pow(2.0, g.band_hi);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double r = std::sqrt(g.freq_norm2(i));
        if (r >= lo && r <= hi) spec[i] = cplx(dist(rng), dist(rng));
    }
    return SpectralField::from_spectrum(g, std::move(spec));
}

// unit-L2 datum whose spectrum is the block multiplier itself, so the
// ladder members are exact dyadic dilates up to lattice sampling
SpectralField block_data(const LPFrame& frame, int level) {
    const auto& g = frame.grid();
    const auto& b = frame.block(level);
    std::vector<cplx> spec(b.begin(), b.end());
    auto f = SpectralField::from_spectrum(g, std::move(spec));
    const double n = f.l2_values();
    if (n == 0.0) throw std::invalid_argument("block datum: empty level");
    std::vector<cplx> unit = f.spectrum();
    for (auto& z : unit) z /= n;
    return SpectralField::from_spectrum(g, std::move(unit));
}

struct KindPlan {
    double scale_c = 1.0;          // measure scaling constant for the LHS
    NormSpec lhs_norm;             // space norm applied along the trajectory
    NormSpec rhs_norm;             // Besov norm on the data (unless rhs_lp)
    bool rhs_plain_lp = false;     // second-order kind: RHS is ||u0||_{L_p}^p
    double bound_factor = 1.0;     // (1 + mu_aT) style factor in the bound
};

double linear_slope(const DyadicSequence& s) {
    if (s.vals.size() < 2) return 0.0;
    return (s.vals.back() - s.vals.front()) / (s.j_hi - s.j_lo);
}

} // namespace

std::vector<std::pair<std::string, SpectralField>> build_data_family(const SpectralGrid& g,
                                                                     const LPFrame& frame,
                                                                     const DataFamily& fam) {
    std::vector<std::pair<std::string, SpectralField>> out;
    switch (fam.kind) {
        case DataFamily::Kind::gaussian:
            for (double s : fam.widths)
                out.emplace_back("gaussian_w" + std::to_string(s), gaussian_data(g, s));
            break;
        case DataFamily::Kind::dilation:
            for (double l : fam.dilations)
                out.emplace_back("dilation_l" + std::to_string(l), gaussian_data(g, 1.0 / l));
            break;
        case DataFamily::Kind::single_block:
            for (int j : fam.block_levels)
                out.emplace_back("block_j" + std::to_string(j), block_data(frame, j));
            break;
        case DataFamily::Kind::random_band:
            for (int k = 0; k < fam.count; ++k)
                out.emplace_back("random_" + std::to_string(k),
                                 random_band_data(g, fam.seed + 977 * k));
            break;
    }
    return out;
}

namespace {

EstimateReport run_scenario(const Scenario& sc, const ForcingSpec* forcing) {
    if (!(sc.q > 0.0)) throw std::invalid_argument("scenario: q must be positive");
    const double gamma = sc.symbol.order;
    if (sc.kind == Scenario::Kind::homogeneous_bessel || sc.kind == Scenario::Kind::gradient) {
        if (!(sc.a > 0.0))
            throw std::invalid_argument("scenario: a must be positive for this estimate kind");
    } else if (sc.kind == Scenario::Kind::second_order) {
        if (!(sc.a > -1.0)) throw std::invalid_argument("scenario: a must exceed -1");
        if (gamma != 2.0)
            throw std::invalid_argument("scenario: second_order needs a gamma = 2 symbol");
    }

    auto g = make_grid(sc.dim, sc.points_per_axis, sc.half_width);
    LPFrame frame(g);
    const auto w_tab = weight_node_values(sc.weight, g);

    DyadicSequence r = sc.smoothness ? *sc.smoothness
                                     : linear_sequence(gamma, frame.band_lo() - 1,
                                                       frame.band_hi() + 1);
    if (sc.kind == Scenario::Kind::second_order)
        r = linear_sequence(2.0 * (sc.a + 1.0) / sc.q, frame.band_lo() - 1, frame.band_hi() + 1);

    // ellipticity gate, once per scenario
    {
        auto rep = check_ellipticity(sc.symbol, g, sc.symbol.default_time_samples(sc.horizon));
        if (!rep.elliptic_verdict && !sc.force_solve)
            throw std::invalid_argument("scenario: symbol fails ellipticity (min ratio " +
                                        std::to_string(rep.min_ellipticity_ratio) + ")");
    }

    KindPlan plan;
    TimeMeasure lhs_measure = sc.measure;
    LaplaceControl ctl;
    const int jlo = frame.band_lo() - 1, jhi = frame.band_hi() + 1;

    switch (sc.kind) {
        case Scenario::Kind::homogeneous_bessel:
        case Scenario::Kind::gradient: {
            plan.scale_c = std::min(1.0, sc.q) * sc.symbol.kappa / std::pow(16.0, gamma);
            ctl = control_sequence(sc.measure, gamma, sc.a, jlo, jhi);
            plan.lhs_norm.flavor = NormSpec::Flavor::bessel;
            plan.lhs_norm.homogeneous = false;
            plan.lhs_norm.p = sc.p;
            plan.lhs_norm.weight = sc.weight;
            plan.lhs_norm.smoothness = r;
            if (sc.kind == Scenario::Kind::gradient) {
                // modulus sum is measured in H^{r - boldgamma}
                int j = plan.lhs_norm.smoothness.j_lo;
                for (auto& v : plan.lhs_norm.smoothness.vals) {
                    v = r.at(j) - gamma * j;
                    ++j;
                }
            }
            plan.rhs_norm.flavor = NormSpec::Flavor::besov;
            plan.rhs_norm.homogeneous = sc.kind == Scenario::Kind::gradient;
            plan.rhs_norm.p = sc.p;
            plan.rhs_norm.q = sc.q;
            plan.rhs_norm.weight = sc.weight;
            plan.rhs_norm.smoothness = r;
            {
                int j = jlo;
                for (auto& v : plan.rhs_norm.smoothness.vals) {
                    v = r.at(j) - ctl.mu.at(j) / sc.q;
                    ++j;
                }
            }
            break;
        }
        case Scenario::Kind::power_case: {
            plan.scale_c = 1.0;
            ctl = control_sequence(sc.measure, gamma, sc.a, jlo, jhi);
            plan.lhs_norm.flavor = NormSpec::Flavor::bessel;
            plan.lhs_norm.homogeneous = false;
            plan.lhs_norm.p = sc.p;
            plan.lhs_norm.weight = sc.weight;
            plan.lhs_norm.smoothness = r;
            plan.rhs_norm.flavor = NormSpec::Flavor::besov;
            plan.rhs_norm.homogeneous = false;
            plan.rhs_norm.p = sc.p;
            plan.rhs_norm.q = sc.q;
            plan.rhs_norm.weight = sc.weight;
            plan.rhs_norm.smoothness = r;
            {
                int j = jlo;
                for (auto& v : plan.rhs_norm.smoothness.vals) {
                    v = r.at(j) - ctl.mu.at(j) / sc.q;
                    ++j;
                }
            }
            break;
        }
        case Scenario::Kind::second_order: {
            plan.scale_c = 1.0;
            lhs_measure = TimeMeasure::lebesgue();
            plan.lhs_norm.flavor = NormSpec::Flavor::bessel;
            plan.lhs_norm.homogeneous = false;
            plan.lhs_norm.p = sc.p;
            plan.lhs_norm.weight = sc.weight;
            plan.lhs_norm.smoothness = r;
            plan.rhs_plain_lp = true;
            break;
        }
        case Scenario::Kind::inhomogeneous: {
            plan.scale_c = 1.0;
            if (!sc.measure.has_density() || !sc.measure.atoms().empty())
                throw std::invalid_argument("inhomogeneous kind needs a pure density measure");
            plan.lhs_norm.flavor = NormSpec::Flavor::bessel;
            plan.lhs_norm.homogeneous = false;
            plan.lhs_norm.p = sc.p;
            plan.lhs_norm.weight = sc.weight;
            plan.lhs_norm.smoothness = r;
            plan.rhs_norm.flavor = NormSpec::Flavor::besov;
            plan.rhs_norm.homogeneous = false;
            plan.rhs_norm.p = sc.p;
            plan.rhs_norm.q = sc.q;
            plan.rhs_norm.weight = sc.weight;
            plan.rhs_norm.smoothness = r;
            {
                // w'(j) = -log2(C mu((0, 2^{-j gamma}))), C normalized at j=0
                const double c_norm = 1.0 / sc.measure.interval_mass(0.0, 1.0);
                int j = jlo;
                for (auto& v : plan.rhs_norm.smoothness.vals) {
                    const double mass =
                        sc.measure.interval_mass(0.0, std::pow(2.0, -gamma * j));
                    v = r.at(j) + std::log2(c_norm * mass) / sc.q;
                    ++j;
                }
            }
            break;
        }
    }

    EstimateReport rep;
    rep.scenario = sc.name;
    rep.split_level = frame.split_level();
    switch (sc.kind) {
        case Scenario::Kind::homogeneous_bessel: rep.kind = "homogeneous_bessel"; break;
        case Scenario::Kind::gradient: rep.kind = "gradient"; break;
        case Scenario::Kind::power_case: rep.kind = "power_case"; break;
        case Scenario::Kind::second_order: rep.kind = "second_order"; break;
        case Scenario::Kind::inhomogeneous: rep.kind = "inhomogeneous"; break;
    }

    // measure factor in the bound
    auto one = [](double) { return 1.0; };
    if (sc.kind == Scenario::Kind::homogeneous_bessel) {
        rep.mu_a_t = weighted_time_integral(sc.measure, sc.a, plan.scale_c, one, sc.horizon);
        plan.bound_factor = 1.0 + rep.mu_a_t;
    } else if (sc.kind == Scenario::Kind::power_case) {
        rep.mu_a_t = weighted_time_integral(sc.measure, sc.a, 1.0, one, sc.horizon);
        plan.bound_factor = std::pow(1.0 + std::pow(rep.mu_a_t, 1.0 / sc.q), sc.q);
    } else if (sc.kind == Scenario::Kind::gradient) {
        rep.mu_a_t = weighted_time_integral(sc.measure, sc.a, plan.scale_c, one, sc.horizon);
        plan.bound_factor = 1.0;
    } else if (sc.kind == Scenario::Kind::inhomogeneous) {
        rep.mu_a_t = sc.measure.interval_mass(0.0, sc.horizon);
        plan.bound_factor = std::pow(1.0 + sc.horizon, sc.q);
    } else {
        rep.mu_a_t = weighted_time_integral(TimeMeasure::lebesgue(), sc.a, 1.0, one, sc.horizon);
        plan.bound_factor = 1.0;
    }

    auto family = build_data_family(g, frame, sc.data);
    rep.per_datum.resize(family.size());

    // forcing field (time-constant), shared across data
    std::optional<SpectralField> f_field;
    if (forcing != nullptr && forcing->kind != ForcingSpec::Kind::none) {
        if (forcing->kind == ForcingSpec::Kind::single_mode) {
            std::vector<cplx> spec(g.size(), cplx(0.0));
            spec.at(static_cast<std::size_t>(forcing->mode_slot)) = forcing->amplitude;
            f_field = SpectralField::from_spectrum(g, std::move(spec));
        } else {
            f_field = random_band_data(g, forcing->seed);
        }
    }

    parallel_for(family.size(), [&](std::size_t di) {
        const auto& [id, u0] = family[di];
        DatumResult res;
        res.id = id;

        // LHS integrand: the space norm (raised to q) along the trajectory
        auto g_of_t = [&](double t) {
            auto u = solve_at(sc.symbol, u0, t, true);
            if (forcing != nullptr && f_field) {
                auto traj2 = solve_inhomogeneous(
                    sc.symbol, [&](double) { return *f_field; }, g, std::vector<double>{t}, true);
                std::vector<cplx> sum(g.size());
                for (std::size_t i = 0; i < g.size(); ++i)
                    sum[i] = u.spectrum()[i] + traj2.states[0].spectrum()[i];
                u = SpectralField::from_spectrum(g, std::move(sum));
            }
            if (sc.kind == Scenario::Kind::gradient) {
                auto op_u = apply_operator(sc.symbol, u, t);
                auto frac_u = fractional_laplacian_apply(u, 0.5 * gamma);
                std::vector<cplx> mix(g.size());
                for (std::size_t i = 0; i < g.size(); ++i)
                    mix[i] = cplx(std::abs(op_u.values()[i]) + std::abs(frac_u.values()[i]), 0.0);
                u = SpectralField::from_values(g, std::move(mix));
            }
            return std::pow(space_norm_detailed(frame, u, plan.lhs_norm, w_tab).value, sc.q);
        };

        // pre-flight: double panels until the density part settles within 1%
        int refine = 0;
        double lhs = weighted_time_integral(lhs_measure, sc.a, plan.scale_c, g_of_t, sc.horizon,
                                            refine);
        if (lhs_measure.has_density()) {
            for (;;) {
                const double next = weighted_time_integral(lhs_measure, sc.a, plan.scale_c,
                                                           g_of_t, sc.horizon, refine + 1);
                const double change =
                    std::abs(next - lhs) / std::max(std::abs(next), 1e-300);
                lhs = next;
                ++refine;
                if (change < 0.01) break;
                if (refine >= 3) {
                    res.refine_capped = true;
                    break;
                }
            }
        }
        res.refine_rounds = refine;
        res.lhs = lhs;

        double rhs_norm_val;
        if (plan.rhs_plain_lp) {
            std::optional<Weight> ow = sc.weight;
            rhs_norm_val = std::pow(weighted_lp_norm(u0, sc.p, ow), sc.p);
        } else {
            rhs_norm_val = std::pow(space_norm_detailed(frame, u0, plan.rhs_norm, w_tab).value,
                                    sc.q);
        }
        double rhs = plan.bound_factor * rhs_norm_val;
        if (forcing != nullptr && f_field) {
            // forcing term of the inhomogeneous bound
            NormSpec fn = plan.lhs_norm;
            int j = fn.smoothness.j_lo;
            for (auto& v : fn.smoothness.vals) {
                v -= gamma * j;
                ++j;
            }
            // recompute from r to avoid accumulating over lhs tweaks
            j = fn.smoothness.j_lo;
            for (auto& v : fn.smoothness.vals) {
                v = r.at(j) - gamma * j;
                ++j;
            }
            const double fnorm = std::pow(space_norm_detailed(frame, *f_field, fn, w_tab).value,
                                          sc.q);
            auto g_f = [&](double) { return fnorm; };
            rhs += plan.bound_factor *
                   weighted_time_integral(lhs_measure, 0.0, 1.0, g_f, sc.horizon);
        }
        res.rhs = rhs;
        if (rhs == 0.0 && lhs > 0.0) {
            res.hard_violation = true;
            res.ratio = std::numeric_limits<double>::infinity();
        } else {
            res.ratio = rhs > 0.0 ? lhs / rhs : 0.0;
        }
        rep.per_datum[di] = res;
    });

    // fold per-datum metadata (tasks wrote disjoint slots only)
    bool any_hard = false;
    for (const auto& d : rep.per_datum) {
        rep.max_ratio = std::max(rep.max_ratio, d.ratio);
        rep.refine_rounds = std::max(rep.refine_rounds, d.refine_rounds);
        rep.refine_cap_hit = rep.refine_cap_hit || d.refine_capped;
        any_hard = any_hard || d.hard_violation;
    }

    // block-ladder slope diagnostics
    if (sc.data.kind == DataFamily::Kind::single_block && rep.per_datum.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < rep.per_datum.size(); ++i) {
            const double x = sc.data.block_levels[i];
            const double y = std::log2(rep.per_datum[i].lhs);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        rep.slope_lhs = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.recovered_smoothing = linear_slope(r) - rep.slope_lhs / sc.q;
    }

    rep.verdict = !any_hard;
    for (const auto& d : rep.per_datum)
        if (!std::isfinite(d.ratio)) rep.verdict = false;
    return rep;
}

} // namespace

EstimateReport verify_estimate(const Scenario& sc) { return run_scenario(sc, nullptr); }

EstimateReport verify_inhomogeneous(const Scenario& sc, const ForcingSpec& forcing) {
    if (forcing.kind == ForcingSpec::Kind::none) return run_scenario(sc, nullptr);
    Scenario sc2 = sc;
    sc2.kind = Scenario::Kind::inhomogeneous;
    return run_scenario(sc2, &forcing);
}

} // namespace psv
