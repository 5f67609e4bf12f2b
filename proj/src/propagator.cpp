#include "psv/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "psv/parallel.hpp"
#include "psv/quadrature.hpp"
#include "psv/reduce.hpp"
#include "psv/simd/kernels.hpp"

namespace psv {
namespace {

// piece boundaries of [s, t] split at the symbol's partition points
std::vector<double> time_segments(const Symbol& sym, double s, double t) {
    std::vector<double> cuts{s};
    for (double p : sym.partition)
        if (p > s && p < t) cuts.push_back(p);
    cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

void ensure_elliptic(const Symbol& sym, const SpectralGrid& g, double horizon, bool force) {
    if (force) return;
    auto rep = check_ellipticity(sym, g, sym.default_time_samples(horizon));
    if (!rep.elliptic_verdict)
        throw std::invalid_argument(
            "solve: symbol fails its declared ellipticity on this grid (min ratio " +
            std::to_string(rep.min_ellipticity_ratio) + "); pass force to override");
}

std::array<double, 3> lattice_xi(const SpectralGrid& g, std::size_t idx) {
    std::array<double, 3> xi{};
    auto sl = g.unflatten(idx);
    for (int a = 0; a < g.dim; ++a) xi[a] = g.freq_of_slot(sl[a]);
    return xi;
}

} // namespace

cplx symbol_time_integral(const Symbol& sym, double s, double t, std::span<const double> xi) {
    if (t < s) throw std::invalid_argument("symbol_time_integral: t < s");
    if (t == s) return cplx(0.0);
    auto cuts = time_segments(sym, s, t);
    cplx acc(0.0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        if (sym.piecewise_constant_in_time) {
            acc += sym(0.5 * (lo + hi), xi) * (hi - lo);
        } else {
            const auto& rule = gauss8();
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            cplx panel(0.0);
            for (std::size_t i = 0; i < rule.size; ++i)
                panel += rule.weights[i] * sym(mid + half * rule.nodes[i], xi);
            acc += panel * half;
        }
    }
    return acc;
}

std::vector<cplx> propagator_multiplier(const Symbol& sym, const SpectralGrid& g, double s,
                                        double t) {
    std::vector<cplx> mult(g.size());
    const std::size_t total = g.size();
    const std::size_t chunk = 16384;
    const std::size_t n_chunks = (total + chunk - 1) / chunk;
    parallel_for(n_chunks, [&](std::size_t ci) {
        const std::size_t lo = ci * chunk, hi = std::min(total, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            auto xi = lattice_xi(g, i);
            mult[i] = std::exp(
                symbol_time_integral(sym, s, t, std::span<const double>(xi.data(), g.dim)));
        }
    });
    return mult;
}

Trajectory solve_homogeneous(const Symbol& sym, const SpectralField& u0,
                             std::span<const double> times, bool force) {
    const auto& g = u0.grid();
    const double horizon = times.empty() ? 1.0 : *std::max_element(times.begin(), times.end());
    ensure_elliptic(sym, g, horizon, force);
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.states.reserve(times.size());
    for (double t : times)
        traj.states.push_back(u0.multiplied(propagator_multiplier(sym, g, 0.0, t)));
    return traj;
}

SpectralField solve_at(const Symbol& sym, const SpectralField& u0, double t, bool force) {
    const double times[1] = {t};
    return std::move(solve_homogeneous(sym, u0, times, force).states.front());
}

Trajectory solve_inhomogeneous(const Symbol& sym,
                               const std::function<SpectralField(double)>& forcing,
                               const SpectralGrid& g, std::span<const double> times, bool force) {
    const double horizon = times.empty() ? 1.0 : *std::max_element(times.begin(), times.end());
    ensure_elliptic(sym, g, horizon, force);
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    const auto& rule = gauss8();
    for (double t : times) {
        std::vector<cplx> acc(g.size(), cplx(0.0));
        if (t > 0.0) {
            auto cuts = time_segments(sym, 0.0, t);
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                // refine each partition segment 4x
                for (int r = 0; r < 4; ++r) {
                    const double lo = cuts[k] + (cuts[k + 1] - cuts[k]) * r / 4.0;
                    const double hi = cuts[k] + (cuts[k + 1] - cuts[k]) * (r + 1) / 4.0;
                    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
                    for (std::size_t q = 0; q < rule.size; ++q) {
                        const double sq = mid + half * rule.nodes[q];
                        auto m = propagator_multiplier(sym, g, sq, t);
                        const auto f = forcing(sq);
                        if (f.grid() != g)
                            throw std::invalid_argument("solve_inhomogeneous: forcing grid mismatch");
                        const double w = rule.weights[q] * half;
                        for (std::size_t i = 0; i < acc.size(); ++i)
                            acc[i] += w * m[i] * f.spectrum()[i];
                    }
                }
            }
        }
        traj.states.push_back(SpectralField::from_spectrum(g, std::move(acc)));
    }
    return traj;
}

SpectralField apply_operator(const Symbol& sym, const SpectralField& f, double t) {
    const auto& g = f.grid();
    std::vector<cplx> mult(g.size());
    for (std::size_t i = 0; i < mult.size(); ++i) {
        auto xi = lattice_xi(g, i);
        mult[i] = sym(t, std::span<const double>(xi.data(), g.dim));
    }
    return f.multiplied(mult);
}

SpectralField fractional_laplacian_apply(const SpectralField& f, double sigma) {
    const auto& g = f.grid();
    std::vector<cplx> mult(g.size());
    for (std::size_t i = 0; i < mult.size(); ++i)
        mult[i] = cplx(-std::pow(g.freq_norm2(i), sigma), 0.0);
    return f.multiplied(mult);
}

KernelSlice kernel_slice(const Symbol& sym, const LPFrame& frame, double epsilon,
                         std::optional<int> j, int m, std::array<int, 3> alpha, double t,
                         double s) {
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("kernel_slice: epsilon outside [0,1]");
    if (m < 0 || m > 1) throw std::invalid_argument("kernel_slice: m must be 0 or 1");
    int order = 0;
    for (int v : alpha) order += v;
    if (order > 2) throw std::invalid_argument("kernel_slice: |alpha| must be <= 2");
    const auto& g = frame.grid();
    const std::vector<double>* window = nullptr;
    std::vector<double> low;
    if (j) {
        if (*j < frame.band_lo() || *j > frame.band_hi())
            throw std::invalid_argument("kernel_slice: unresolved level");
        window = &frame.block(*j);
    } else {
        low = frame.low_pass(frame.split_level());
        window = &low;
    }

    const double norm = std::pow(2.0 * M_PI, -0.5 * g.dim);
    std::vector<cplx> spec(g.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if ((*window)[i] == 0.0) {
            spec[i] = cplx(0.0);
            continue;
        }
        auto xi = lattice_xi(g, i);
        const std::span<const double> xis(xi.data(), g.dim);
        cplx v = std::exp(symbol_time_integral(sym, s, t, xis));
        if (m == 1) v *= sym(t, xis);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += xi[a] * xi[a];
        if (epsilon > 0.0) v *= std::pow(r2, 0.5 * epsilon * sym.order);
        for (int a = 0; a < g.dim; ++a)
            for (int rep = 0; rep < alpha[a]; ++rep) v *= cplx(0.0, xi[a]);
        spec[i] = v * ((*window)[i] * norm);
    }

    KernelSlice out{epsilon, j, m, alpha, t, s,
                    SpectralField::from_spectrum(g, std::move(spec))};
    return out;
}

namespace {

double moment_at(const SpectralGrid& g, std::size_t idx, double n) {
    if (n == 0.0) return 1.0;
    auto sl = g.unflatten(idx);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const double x = g.coord(sl[a]);
        r2 += x * x;
    }
    return std::pow(r2, 0.5 * n);
}

} // namespace

double slice_moment_norm(const KernelSlice& slice, double n, double p) {
    const auto& g = slice.field.grid();
    const auto& vals = slice.field.values();
    if (std::isinf(p)) {
        double worst = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            worst = std::max(worst, moment_at(g, i, n) * std::abs(vals[i]));
        return worst;
    }
    std::vector<double> terms(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
        terms[i] = std::pow(moment_at(g, i, n) * std::abs(vals[i]), p);
    return std::pow(pairwise_sum(terms) * g.cell_volume(), 1.0 / p);
}

double slice_tail_fraction(const KernelSlice& slice, double n, double p) {
    const auto& g = slice.field.grid();
    const auto& vals = slice.field.values();
    const double half = 0.5 * g.half_width;
    const double pp = std::isinf(p) ? 1.0 : p;
    double total = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        auto sl = g.unflatten(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.coord(sl[a]);
            r2 += x * x;
        }
        const double term = std::pow(moment_at(g, i, n) * std::abs(vals[i]), pp);
        total += term;
        if (std::sqrt(r2) >= half) tail += term;
    }
    return total > 0.0 ? tail / total : 0.0;
}

KernelBoundReport kernel_bound_report(const Symbol& sym, const LPFrame& frame,
                                      const KernelSweep& sweep) {
    KernelBoundReport rep;
    rep.delta = sweep.delta;
    const double gamma = sym.order;
    const double kappa = sym.kappa;
    const int dim = frame.grid().dim;

    struct RowSpec {
        double eps;
        std::optional<int> j;
        double t;
        double p;
        double n;
        int m;
        std::array<int, 3> alpha;
    };
    std::vector<RowSpec> specs;
    for (double eps : sweep.epsilons)
        for (const auto& [n, m, alpha] : sweep.nma)
            for (double p : sweep.p_values) {
                if (n > 0.0 && p < 2.0) continue;  // moment rows only for p >= 2
                for (int j : sweep.j_levels)
                    for (double ts : sweep.t_times_scale)
                        specs.push_back(
                            {eps, j, sweep.s + ts * std::pow(2.0, -gamma * j), p, n, m, alpha});
                if (sweep.include_s0 && n == 0.0)
                    for (double t : sweep.s0_times)
                        specs.push_back({eps, std::nullopt, sweep.s + t, p, n, m, alpha});
            }

    rep.rows.resize(specs.size());
    parallel_for(specs.size(), [&](std::size_t i) {
        const auto& rs = specs[i];
        auto slice = kernel_slice(sym, frame, rs.eps, rs.j, rs.m, rs.alpha, rs.t, sweep.s);
        KernelBoundRow row;
        row.epsilon = rs.eps;
        row.j = rs.j ? *rs.j : std::numeric_limits<int>::min();
        row.t = rs.t;
        row.p = rs.p;
        row.n = rs.n;
        row.m = rs.m;
        row.alpha_code = rs.alpha[0] + 10 * rs.alpha[1] + 100 * rs.alpha[2];
        row.lhs = slice_moment_norm(slice, rs.n, rs.p);
        const double dt = rs.t - sweep.s;
        if (rs.j) {
            const double scale = std::pow(2.0, gamma * *rs.j);
            const double dpp = dim * (std::isinf(rs.p) ? 1.0 : 1.0 - 1.0 / rs.p);
            row.shape = std::exp(-kappa * dt * scale * (1.0 - sweep.delta) / std::pow(2.0, gamma)) *
                        std::pow(2.0, *rs.j * ((rs.m + rs.eps) * gamma + rs.alpha[0] +
                                               rs.alpha[1] + rs.alpha[2] - rs.n + dpp));
        } else {
            row.shape = 1.0;  // S0 bound is a constant
        }
        row.log2_n_hat = std::log2(row.lhs / row.shape);
        row.tail_flagged = slice_tail_fraction(slice, rs.n, rs.p) >= 0.01;
        row.underflow_excluded = row.lhs < 1e-250;
        rep.rows[i] = row;
    });

    // block cells keyed by (eps, p, n, m, alpha, tau); spread over j
    for (double eps : sweep.epsilons)
        for (const auto& [n, m, alpha] : sweep.nma)
            for (double p : sweep.p_values) {
                if (n > 0.0 && p < 2.0) continue;
                const int acode = alpha[0] + 10 * alpha[1] + 100 * alpha[2];
                for (double tau : sweep.t_times_scale) {
                    KernelCellSummary cell;
                    cell.epsilon = eps;
                    cell.p = p;
                    cell.n = n;
                    cell.m = m;
                    cell.alpha_code = acode;
                    cell.tau = tau;
                    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                    double log_sum = 0.0;
                    int used = 0;
                    for (const auto& row : rep.rows) {
                        if (row.epsilon != eps || row.p != p || row.n != n || row.m != m ||
                            row.alpha_code != acode)
                            continue;
                        if (row.j == std::numeric_limits<int>::min()) continue;
                        const double row_tau =
                            (row.t - sweep.s) * std::pow(2.0, gamma * row.j);
                        if (std::abs(row_tau - tau) > 1e-9 * tau) continue;
                        if (row.tail_flagged || row.underflow_excluded) continue;
                        lo = std::min(lo, row.log2_n_hat);
                        hi = std::max(hi, row.log2_n_hat);
                        log_sum += row.log2_n_hat;
                        ++used;
                    }
                    cell.rows_used = used;
                    if (used > 0) {
                        cell.max_log2_n_hat = hi;
                        cell.spread_log2_n_hat = hi - lo;
                        cell.geomean_n_hat = std::pow(2.0, log_sum / used);
                        cell.max_over_fit = std::pow(2.0, hi) / cell.geomean_n_hat;
                    }
                    rep.cells.push_back(cell);
                }
                if (sweep.include_s0 && n == 0.0) {
                    KernelCellSummary cell;
                    cell.epsilon = eps;
                    cell.p = p;
                    cell.n = n;
                    cell.m = m;
                    cell.alpha_code = acode;
                    cell.s0 = true;
                    double sx = 0, sy = 0, sxx = 0, sxy = 0;
                    int ns0 = 0;
                    for (const auto& row : rep.rows) {
                        if (row.epsilon != eps || row.p != p || row.n != n || row.m != m ||
                            row.alpha_code != acode)
                            continue;
                        if (row.j != std::numeric_limits<int>::min()) continue;
                        const double x = std::log(row.t - sweep.s), y = std::log(row.lhs);
                        sx += x;
                        sy += y;
                        sxx += x * x;
                        sxy += x * y;
                        ++ns0;
                    }
                    cell.rows_used = ns0;
                    cell.s0_slope =
                        ns0 > 1 ? (ns0 * sxy - sx * sy) / (ns0 * sxx - sx * sx) : 0.0;
                    rep.cells.push_back(cell);
                }
            }
    return rep;
}

double TimeBump::value(double t) const {
    const double s = (t - a) / (b - a);
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(4.0 - 1.0 / s - 1.0 / (1.0 - s));
}

double TimeBump::derivative(double t) const {
    const double s = (t - a) / (b - a);
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double ds = 1.0 / (s * s) - 1.0 / ((1.0 - s) * (1.0 - s));
    return value(t) * ds / (b - a);
}

double weak_residual(const Symbol& sym, const Trajectory& traj, const SpectralField& phi_x,
                     const std::function<double(double)>& beta,
                     const std::function<double(double)>& beta_prime) {
    if (traj.times.size() < 2) throw std::invalid_argument("weak_residual: need >= 2 samples");
    if (std::abs(beta(traj.times.front())) > 1e-300 ||
        std::abs(beta(traj.times.back())) > 1e-300)
        throw std::invalid_argument("weak_residual: test function must vanish at the sampled "
                                    "endpoints");
    const auto& g = phi_x.grid();
    const double vol = g.cell_volume();

    // plain and conjugated-symbol pairings of the spatial factor per time
    std::vector<cplx> inner_plain(traj.times.size());
    std::vector<cplx> inner_op(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& u = traj.states[k];
        if (u.grid() != g) throw std::invalid_argument("weak_residual: grid mismatch");
        // psi-bar(t, -i grad) phi via the conjugate multiplier
        std::vector<cplx> mult(g.size());
        for (std::size_t i = 0; i < mult.size(); ++i) {
            std::array<double, 3> xi{};
            auto sl = g.unflatten(i);
            for (int a = 0; a < g.dim; ++a) xi[a] = g.freq_of_slot(sl[a]);
            mult[i] = std::conj(sym(traj.times[k], std::span<const double>(xi.data(), g.dim)));
        }
        auto op_phi = phi_x.multiplied(mult);
        cplx s_plain(0.0), s_op(0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            s_plain += u.values()[i] * phi_x.values()[i];
            s_op += u.values()[i] * op_phi.values()[i];
        }
        inner_plain[k] = s_plain * vol;
        inner_op[k] = s_op * vol;
    }

    auto trapezoid = [&](const std::function<cplx(std::size_t)>& f) {
        cplx acc(0.0);
        for (std::size_t k = 0; k + 1 < traj.times.size(); ++k)
            acc += 0.5 * (traj.times[k + 1] - traj.times[k]) * (f(k) + f(k + 1));
        return acc;
    };
    const cplx lhs =
        -trapezoid([&](std::size_t k) { return inner_plain[k] * beta_prime(traj.times[k]); });
    const cplx rhs =
        trapezoid([&](std::size_t k) { return inner_op[k] * beta(traj.times[k]); });
    const double floor = 1e-30;
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), floor});
}

} // namespace psv
