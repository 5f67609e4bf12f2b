#include "psv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "psv/quadrature.hpp"

namespace psv {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const std::vector<double>& logs) {
    double m = kNegInf;
    for (double v : logs) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - m);
    return m + std::log(acc);
}

// antiderivative-based mass of amp * t^b over (s, e), b > -1
double power_mass(double amp, double b, double s, double e) {
    if (e <= s) return 0.0;
    return amp * (std::pow(e, b + 1.0) - std::pow(s, b + 1.0)) / (b + 1.0);
}

// mass of the two-valued dyadic block density over (0, theta)
double blocks_mass_from_zero(double v0, double v1, double theta) {
    if (theta <= 0.0) return 0.0;
    const double k_real = std::floor(std::log2(theta));
    const long K = static_cast<long>(k_real);
    // full blocks k <= K-1 split by parity; geometric sums of 2^k with
    // ratio 4 downwards
    auto parity_sum = [](long top) {  // sum of 2^k over k <= top, k = top, top-2, ...
        return std::pow(2.0, static_cast<double>(top)) * (4.0 / 3.0);
    };
    const long top = K - 1;
    double full = 0.0;
    // largest k <= top with even parity and with odd parity
    const long top_even = (top % 2 == 0) ? top : top - 1;
    const long top_odd = (top % 2 != 0) ? top : top - 1;
    auto block_value = [&](long k) { return ((k % 2 + 2) % 2) == 0 ? v0 : v1; };
    full += block_value(top_even) * parity_sum(top_even);
    full += block_value(top_odd) * parity_sum(top_odd);
    full += block_value(K) * (theta - std::pow(2.0, static_cast<double>(K)));
    return full;
}

} // namespace

DyadicSequence linear_sequence(double slope, int j_lo, int j_hi) {
    DyadicSequence s;
    s.j_lo = j_lo;
    s.j_hi = j_hi;
    for (int j = j_lo; j <= j_hi; ++j) s.vals.push_back(slope * j);
    return s;
}

DyadicSequence constant_sequence(double value, int j_lo, int j_hi) {
    DyadicSequence s;
    s.j_lo = j_lo;
    s.j_hi = j_hi;
    s.vals.assign(static_cast<std::size_t>(j_hi - j_lo + 1), value);
    return s;
}

double TimeMeasure::Density::eval(double t) const {
    switch (kind) {
        case Kind::none:
            return 0.0;
        case Kind::power:
            return amp1 * std::pow(t, b1);
        case Kind::power_sum:
            return amp1 * std::pow(t, b1) + amp2 * std::pow(t, b2);
        case Kind::blocks: {
            const long k = static_cast<long>(std::floor(std::log2(t)));
            return ((k % 2 + 2) % 2) == 0 ? v0 : v1;
        }
        case Kind::custom:
            return fn(t);
    }
    return 0.0;
}

double TimeMeasure::Density::endpoint_exponent() const {
    switch (kind) {
        case Kind::none:
            return 0.0;
        case Kind::power:
            return b1;
        case Kind::power_sum:
            return std::min(b1, b2);
        case Kind::blocks:
            return 0.0;
        case Kind::custom:
            return fn_endpoint;
    }
    return 0.0;
}

TimeMeasure TimeMeasure::power_density(double b, double amp) {
    if (b <= -1.0)
        throw std::invalid_argument("power density: exponent must exceed -1 for integrability");
    TimeMeasure m;
    m.density_.kind = Density::Kind::power;
    m.density_.amp1 = amp;
    m.density_.b1 = b;
    return m;
}

TimeMeasure TimeMeasure::power_sum_density(double b1, double b2) {
    if (b1 <= -1.0 || b2 <= -1.0)
        throw std::invalid_argument("power-sum density: exponents must exceed -1");
    TimeMeasure m;
    m.density_.kind = Density::Kind::power_sum;
    m.density_.amp1 = 1.0;
    m.density_.b1 = b1;
    m.density_.amp2 = 1.0;
    m.density_.b2 = b2;
    return m;
}

TimeMeasure TimeMeasure::ainfty_blocks(double v0, double v1) {
    if (!(v0 > 0.0) || !(v1 > 0.0)) throw std::invalid_argument("block density: values must be > 0");
    TimeMeasure m;
    m.density_.kind = Density::Kind::blocks;
    m.density_.v0 = v0;
    m.density_.v1 = v1;
    return m;
}

TimeMeasure TimeMeasure::dirac(double t0, double mass) {
    if (!(t0 > 0.0) || !(mass > 0.0)) throw std::invalid_argument("dirac: need t0 > 0, mass > 0");
    TimeMeasure m;
    m.atoms_.emplace_back(t0, mass);
    return m;
}

TimeMeasure TimeMeasure::custom_density(std::function<double(double)> fn,
                                        double endpoint_exponent) {
    if (endpoint_exponent <= -1.0)
        throw std::invalid_argument("custom density: endpoint exponent must exceed -1");
    TimeMeasure m;
    m.density_.kind = Density::Kind::custom;
    m.density_.fn = std::move(fn);
    m.density_.fn_endpoint = endpoint_exponent;
    return m;
}

TimeMeasure TimeMeasure::with_scale(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("measure scale must be positive");
    TimeMeasure m = *this;
    m.scale_ *= c;
    return m;
}

TimeMeasure TimeMeasure::with_atom(double t0, double mass) const {
    if (!(t0 > 0.0) || !(mass > 0.0)) throw std::invalid_argument("atom: need t0 > 0, mass > 0");
    TimeMeasure m = *this;
    m.atoms_.emplace_back(t0, mass);
    std::sort(m.atoms_.begin(), m.atoms_.end());
    return m;
}

std::vector<std::pair<double, double>> TimeMeasure::effective_atoms() const {
    auto out = atoms_;
    for (auto& [t, mass] : out) t /= scale_;
    return out;
}

TimeMeasure TimeMeasure::tilted(double a0) const {
    TimeMeasure out;
    out.scale_ = 1.0;
    const double c = scale_;
    switch (density_.kind) {
        case Density::Kind::none:
            break;
        case Density::Kind::power:
            out.density_.kind = Density::Kind::power;
            out.density_.b1 = density_.b1 - a0;
            out.density_.amp1 = density_.amp1 * std::pow(c, density_.b1 + 1.0);
            if (out.density_.b1 <= -1.0)
                throw std::invalid_argument("tilted measure loses integrability at 0");
            break;
        case Density::Kind::power_sum:
            out.density_.kind = Density::Kind::power_sum;
            out.density_.b1 = density_.b1 - a0;
            out.density_.amp1 = density_.amp1 * std::pow(c, density_.b1 + 1.0);
            out.density_.b2 = density_.b2 - a0;
            out.density_.amp2 = density_.amp2 * std::pow(c, density_.b2 + 1.0);
            if (out.density_.b1 <= -1.0 || out.density_.b2 <= -1.0)
                throw std::invalid_argument("tilted measure loses integrability at 0");
            break;
        case Density::Kind::blocks:
        case Density::Kind::custom: {
            auto base = density_;
            out.density_.kind = Density::Kind::custom;
            out.density_.fn = [base, c, a0](double u) {
                return c * base.eval(c * u) * std::pow(u, -a0);
            };
            out.density_.fn_endpoint = density_.endpoint_exponent() - a0;
            if (out.density_.fn_endpoint <= -1.0)
                throw std::invalid_argument("tilted measure loses integrability at 0");
            break;
        }
    }
    for (const auto& [t, mass] : atoms_) {
        const double u = t / c;
        out.atoms_.emplace_back(u, mass * std::pow(u, -a0));
    }
    std::sort(out.atoms_.begin(), out.atoms_.end());
    return out;
}

namespace {

// graded-panel Gauss-Legendre Laplace quadrature of a density; returns the
// per-panel contributions as logs for the log-sum-exp path
std::vector<double> density_laplace_panel_logs(const TimeMeasure::Density& d, double lambda) {
    std::vector<double> logs;
    if (!d.present()) return logs;
    const auto& rule = gauss16();
    const double pivot = 1.0 / lambda;
    const double e0 = d.endpoint_exponent();

    auto panel_log = [&](double lo, double hi) {
        // factor e^{-lambda lo} out so panel sums stay representable
        double acc = 0.0;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < rule.size; ++i) {
            const double t = mid + half * rule.nodes[i];
            acc += rule.weights[i] * std::exp(-lambda * (t - lo)) * d.eval(t);
        }
        acc *= half;
        if (acc <= 0.0) return kNegInf;
        return -lambda * lo + std::log(acc);
    };

    // downward panels (pivot 2^{-k-1}, pivot 2^{-k}] until the endpoint power
    // says the remaining mass is negligible
    double running_log = kNegInf;
    for (int k = 0; k < 1100; ++k) {
        const double hi = pivot * std::pow(0.5, k);
        const double lo = 0.5 * hi;
        if (lo < 1e-300) break;
        const double pl = panel_log(lo, hi);
        logs.push_back(pl);
        running_log = logsumexp({running_log, pl});
        // remaining mass below lo is of order lo^{e0+1}
        if ((e0 + 1.0) * std::log(lo) < running_log + std::log(1e-16)) break;
    }
    // upward panels until the exponential cutoff
    for (int k = 0;; ++k) {
        const double lo = pivot * std::pow(2.0, k);
        const double hi = 2.0 * lo;
        if (std::exp(-lambda * lo) < 1e-18 && k > 0) break;
        if (lo > 1e290) break;
        logs.push_back(panel_log(lo, hi));
        if (lambda * lo > 50.0) break;
    }
    return logs;
}

} // namespace

double TimeMeasure::laplace_log(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("laplace: lambda must be positive");
    if (density_.present() && density_.endpoint_exponent() <= -1.0)
        throw std::invalid_argument("laplace: density not integrable at 0");
    const double lam_base = lambda / scale_;
    auto logs = density_laplace_panel_logs(density_, lam_base);
    for (const auto& [t, mass] : atoms_) logs.push_back(std::log(mass) - lam_base * t);
    return logsumexp(logs);
}

double TimeMeasure::laplace(double lambda) const { return std::exp(laplace_log(lambda)); }

double TimeMeasure::interval_mass(double s, double e) const {
    if (e <= s) return 0.0;
    const double bs = std::max(0.0, s) * scale_;
    const double be = e * scale_;
    double mass = 0.0;
    switch (density_.kind) {
        case Density::Kind::none:
            break;
        case Density::Kind::power:
            mass += power_mass(density_.amp1, density_.b1, bs, be);
            break;
        case Density::Kind::power_sum:
            mass += power_mass(density_.amp1, density_.b1, bs, be) +
                    power_mass(density_.amp2, density_.b2, bs, be);
            break;
        case Density::Kind::blocks:
            mass += blocks_mass_from_zero(density_.v0, density_.v1, be) -
                    blocks_mass_from_zero(density_.v0, density_.v1, bs);
            break;
        case Density::Kind::custom: {
            // graded panels toward the left endpoint when it touches 0
            const auto& rule = gauss16();
            if (bs > 0.0 && bs > be * 1e-12) {
                const int panels = 64;
                for (int i = 0; i < panels; ++i) {
                    const double lo = bs + (be - bs) * i / panels;
                    const double hi = bs + (be - bs) * (i + 1) / panels;
                    mass += gauss_integrate(rule, lo, hi, density_.fn);
                }
            } else {
                double hi = be;
                for (int k = 0; k < 1100 && hi > 1e-300; ++k) {
                    const double lo = 0.5 * hi;
                    mass += gauss_integrate(rule, lo, hi, density_.fn);
                    if (std::pow(lo, density_.fn_endpoint + 1.0) < 1e-16 * mass) break;
                    hi = lo;
                }
            }
            break;
        }
    }
    for (const auto& [t, m] : atoms_)
        if (t > bs && t <= be) mass += m;
    return mass;
}

LaplaceControl control_sequence(const TimeMeasure& m, double gamma, double a, int j_lo, int j_hi) {
    if (j_hi < j_lo) throw std::invalid_argument("control_sequence: empty range");
    const double probe = std::pow(2.0, gamma * j_lo);
    if (!std::isfinite(m.laplace_log(probe)))
        throw std::invalid_argument("control_sequence: Laplace transform not finite at range start");
    LaplaceControl ctl;
    ctl.gamma = gamma;
    ctl.a = a;
    ctl.mu.j_lo = j_lo;
    ctl.mu.j_hi = j_hi;
    const double log2e = 1.0 / std::log(2.0);
    for (int j = j_lo; j <= j_hi; ++j) {
        const double lam = std::pow(2.0, gamma * j);
        ctl.mu.vals.push_back(gamma * j * a - m.laplace_log(lam) * log2e);
    }
    return ctl;
}

DoublingReport doubling_constant(const TimeMeasure& m, double k) {
    if (!(k > 1.0)) throw std::invalid_argument("doubling_constant: k must exceed 1");
    DoublingReport rep;
    for (int a = -20; a < 20; ++a) {
        for (int b = a + 1; b <= 20; ++b) {
            const double s = std::pow(2.0, a), e = std::pow(2.0, b);
            const double base = m.interval_mass(s, e);
            const double scaled = m.interval_mass(k * s, k * e);
            if (base == 0.0) {
                if (scaled == 0.0)
                    ++rep.skipped;
                else
                    rep.infinite = true;
                continue;
            }
            const double ratio = scaled / base;
            if (ratio > 1e12) rep.infinite = true;
            rep.value = std::max(rep.value, ratio);
        }
    }
    return rep;
}

WeakScalingReport weak_scaling_constants(const TimeMeasure& m, double k, int samples_per_dyade) {
    if (!(k > 1.0)) throw std::invalid_argument("weak_scaling: k must exceed 1");
    WeakScalingReport rep;
    rep.b_k = std::numeric_limits<double>::infinity();
    rep.big_b_k = 0.0;
    const int dyades = 20;
    const int total = 2 * dyades * samples_per_dyade;
    for (int i = 0; i <= total; ++i) {
        const double ld = -dyades + static_cast<double>(2 * dyades) * i / total;
        const double theta = std::pow(2.0, ld);
        const double denom = m.interval_mass(0.0, k * theta);
        if (denom == 0.0) {
            ++rep.skipped;
            continue;
        }
        const double ratio = m.interval_mass(0.0, theta) / denom;
        rep.b_k = std::min(rep.b_k, ratio);
        rep.big_b_k = std::max(rep.big_b_k, ratio);
    }
    rep.verdict = rep.b_k > 0.0 && rep.big_b_k < 1.0;
    return rep;
}

RatioBounds laplace_equivalence_check(const TimeMeasure& m, double a0,
                                      std::span<const double> lambdas) {
    auto ws = weak_scaling_constants(m, 2.0);
    if (!ws.verdict)
        throw std::invalid_argument("laplace_equivalence_check: weak scaling verdict failed");
    const double cap = -std::log2(ws.big_b_k);
    if (a0 < 0.0 || a0 >= cap)
        throw std::invalid_argument("laplace_equivalence_check: a0 outside [0, -log2 B_2)");
    const TimeMeasure tilted = m.tilted(a0);
    RatioBounds out{std::numeric_limits<double>::infinity(), 0.0};
    for (double lam : lambdas) {
        const double num = tilted.laplace(lam);
        const double den = std::pow(lam, a0) * m.interval_mass(0.0, 1.0 / lam);
        if (den == 0.0) throw std::runtime_error("laplace_equivalence_check: zero denominator");
        const double r = num / den;
        out.lo = std::min(out.lo, r);
        out.hi = std::max(out.hi, r);
    }
    return out;
}

double weighted_time_integral(const TimeMeasure& m, double a, double c,
                              const std::function<double(double)>& g, double T, int refine) {
    if (!(T > 0.0)) throw std::invalid_argument("weighted_time_integral: T must be positive");
    const TimeMeasure scaled = m.with_scale(c);
    double total = 0.0;
    // atoms on the effective clock, exactly
    for (const auto& [u, mass] : scaled.effective_atoms())
        if (u > 0.0 && u <= T) total += mass * g(u) * std::pow(u, a);

    if (scaled.has_density()) {
        const double e0 = scaled.density().endpoint_exponent();
        if (a + e0 <= -1.0)
            throw std::invalid_argument("weighted_time_integral: combined endpoint exponent <= -1");
        // effective density rho_eff(u) = c_tot * rho(c_tot u)
        const double ct = scaled.scale();
        auto integrand = [&](double u) {
            return g(u) * std::pow(u, a) * ct * scaled.density().eval(ct * u);
        };
        const auto& rule = gauss16();
        const int splits = 1 << refine;
        double hi = T;
        double density_part = 0.0;
        for (int k = 0; k < 1100 && hi > 1e-300; ++k) {
            const double lo = 0.5 * hi;
            for (int s = 0; s < splits; ++s) {
                const double plo = lo + (hi - lo) * s / splits;
                const double phi = lo + (hi - lo) * (s + 1) / splits;
                density_part += gauss_integrate(rule, plo, phi, integrand);
            }
            if (std::pow(lo, a + e0 + 1.0) < 1e-16 * std::max(std::abs(density_part), 1e-300))
                break;
            hi = lo;
        }
        total += density_part;
    }
    return total;
}

} // namespace psv
