#include "psv/lp_frame.hpp"

#include <cmath>
#include <stdexcept>

#include "psv/reduce.hpp"
#include "psv/simd/kernels.hpp"

namespace psv {
namespace {

double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

} // namespace

double LPFrame::chi(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double s = 2.0 - r;  // in (0, 1)
    const double a = bump(s), b = bump(1.0 - s);
    return a / (a + b);
}

LPFrame::LPFrame(const SpectralGrid& g) : grid_(g) {
    radius_.resize(g.size());
    double max_r = 0.0;
    for (std::size_t i = 0; i < radius_.size(); ++i) {
        radius_[i] = std::sqrt(g.freq_norm2(i));
        max_r = std::max(max_r, radius_[i]);
    }
    ladder_lo_ = static_cast<int>(std::floor(std::log2(g.freq_step)));
    ladder_hi_ = static_cast<int>(std::ceil(std::log2(max_r))) + 1;
    split_level_ = (g.band_lo <= 0 && 0 <= g.band_hi) ? 0 : g.band_lo;

    blocks_.resize(static_cast<std::size_t>(ladder_hi_ - ladder_lo_ + 1));
    for (int j = ladder_lo_; j <= ladder_hi_; ++j) {
        auto& tab = blocks_[static_cast<std::size_t>(j - ladder_lo_)];
        tab.resize(radius_.size());
        const double inv = std::pow(2.0, -j);
        for (std::size_t i = 0; i < radius_.size(); ++i) {
            const double v = chi(inv * radius_[i]) - chi(2.0 * inv * radius_[i]);
            tab[i] = v < 0.0 ? 0.0 : v;  // clamp rounding residue
        }
    }
}

const std::vector<double>& LPFrame::block(int j) const {
    if (j < ladder_lo_ || j > ladder_hi_)
        throw std::invalid_argument("LPFrame::block: level outside tabulated ladder");
    return blocks_[static_cast<std::size_t>(j - ladder_lo_)];
}

std::vector<double> LPFrame::low_pass(int j0) const {
    std::vector<double> tab(radius_.size());
    const double inv = std::pow(2.0, -j0);
    for (std::size_t i = 0; i < radius_.size(); ++i) tab[i] = chi(inv * radius_[i]);
    return tab;
}

namespace {

SpectralField apply_real_multiplier(const SpectralField& f, const std::vector<double>& mult,
                                    double scale = 1.0) {
    std::vector<cplx> spec(f.spectrum().size());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = f.spectrum()[i] * (mult[i] * scale);
    return SpectralField::from_spectrum(f.grid(), std::move(spec));
}

} // namespace

SpectralField LPFrame::project(const SpectralField& f, int j) const {
    if (j < band_lo() - 1 || j > band_hi() + 1)
        throw std::invalid_argument("LPFrame::project: level outside resolved band");
    return apply_real_multiplier(f, block(j));
}

SpectralField LPFrame::low_projection(const SpectralField& f, int j0) const {
    if (j0 < band_lo() - 1 || j0 > band_hi() + 1)
        throw std::invalid_argument("LPFrame::low_projection: level outside resolved band");
    return apply_real_multiplier(f, low_pass(j0));
}

SpectralField LPFrame::project_scaled(const SpectralField& f, int j, double scale_log2) const {
    return apply_real_multiplier(f, block(j), std::pow(2.0, scale_log2));
}

NormResult space_norm_detailed(const LPFrame& frame, const SpectralField& f,
                               const NormSpec& spec) {
    return space_norm_detailed(frame, f, spec, weight_node_values(spec.weight, frame.grid()));
}

NormResult space_norm_detailed(const LPFrame& frame, const SpectralField& f, const NormSpec& spec,
                               const std::vector<double>& w_tab) {
    const auto& g = frame.grid();
    if (!(spec.q > 0.0)) throw std::invalid_argument("space_norm: q must be positive");
    if (!spec.smoothness.covers(frame.band_lo(), frame.band_hi()))
        throw std::invalid_argument("space_norm: smoothness sequence does not cover the band");
    for (double v : spec.smoothness.vals)
        if (v > 900.0) throw std::invalid_argument("space_norm: 2^{r(j)} overflows");  // 2^{-huge} just underflows to 0
    NormResult out;
    out.split_level = frame.split_level();

    const int lo = spec.homogeneous ? frame.band_lo() : out.split_level + 1;
    const int hi = frame.band_hi();

    if (spec.flavor == NormSpec::Flavor::bessel) {
        std::vector<double> acc(g.size(), 0.0);
        for (int j = lo; j <= hi; ++j) {
            auto pj = frame.project_scaled(f, j, spec.smoothness.at(j));
            simd::active_kernels().abs2_accum(acc.data(), pj.values().data(), acc.size());
        }
        std::vector<double> terms(acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i)
            terms[i] = w_tab[i] * std::pow(acc[i], 0.5 * spec.p);
        double high = std::pow(pairwise_sum(terms) * g.cell_volume(), 1.0 / spec.p);
        if (!spec.homogeneous) {
            auto s0 = frame.low_projection(f, out.split_level);
            high += weighted_lp_norm(s0, spec.p, w_tab);
        }
        out.value = high;
        return out;
    }

    // besov flavor: ell_q over levels of weighted L_p block norms
    double sum_q = 0.0;
    for (int j = lo; j <= hi; ++j) {
        const double nj = weighted_lp_norm(frame.project(f, j), spec.p, w_tab);
        sum_q += std::pow(2.0, spec.q * spec.smoothness.at(j)) * std::pow(nj, spec.q);
    }
    double high = std::pow(sum_q, 1.0 / spec.q);
    if (!spec.homogeneous) {
        auto s0 = frame.low_projection(f, out.split_level);
        high += weighted_lp_norm(s0, spec.p, w_tab);
    }
    out.value = high;
    return out;
}

double space_norm(const LPFrame& frame, const SpectralField& f, const NormSpec& spec) {
    return space_norm_detailed(frame, f, spec).value;
}

double classical_bessel_norm(const SpectralField& f, double s, double p, const Weight& w) {
    const auto& g = f.grid();
    std::vector<cplx> spec(f.spectrum().size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] = f.spectrum()[i] * std::pow(1.0 + g.freq_norm2(i), 0.5 * s);
    auto lifted = SpectralField::from_spectrum(g, std::move(spec));
    std::optional<Weight> ow = w;
    return weighted_lp_norm(lifted, p, ow);
}

std::vector<double> square_function(const LPFrame& frame, const SpectralField& f) {
    std::vector<double> acc(frame.grid().size(), 0.0);
    for (int j = frame.band_lo(); j <= frame.band_hi(); ++j) {
        auto pj = frame.project(f, j);
        simd::active_kernels().abs2_accum(acc.data(), pj.values().data(), acc.size());
    }
    for (auto& v : acc) v = std::sqrt(v);
    return acc;
}

namespace {

std::vector<double> lift_multiplier(const LPFrame& frame, const DyadicSequence& r,
                                    bool homogeneous) {
    if (!r.covers(frame.band_lo(), frame.band_hi()))
        throw std::invalid_argument("lift: sequence does not cover the band");
    for (double v : r.vals)
        if (v > 900.0) throw std::invalid_argument("lift: 2^{r(j)} overflows");
    std::vector<double> mult(frame.grid().size(), 0.0);
    const int lo = homogeneous ? frame.band_lo() : frame.split_level() + 1;
    if (!homogeneous) mult = frame.low_pass(frame.split_level());
    for (int j = lo; j <= frame.band_hi(); ++j) {
        const double s = std::pow(2.0, r.at(j));
        const auto& b = frame.block(j);
        for (std::size_t i = 0; i < mult.size(); ++i) mult[i] += s * b[i];
    }
    return mult;
}

} // namespace

SpectralField lift(const LPFrame& frame, const SpectralField& f, const DyadicSequence& r,
                   bool homogeneous) {
    return apply_real_multiplier(f, lift_multiplier(frame, r, homogeneous));
}

SpectralField lift_inverse(const LPFrame& frame, const SpectralField& f, const DyadicSequence& r,
                           bool homogeneous) {
    auto mult = lift_multiplier(frame, r, homogeneous);
    for (auto& v : mult) v = v > 1e-280 ? 1.0 / v : 0.0;
    return apply_real_multiplier(f, mult);
}

double mikhlin_constant(const std::function<cplx(std::span<const double>)>& multiplier,
                        const SpectralGrid& g) {
    // central differences with the same step policy as the symbol checks
    auto derivative = [&](const std::vector<int>& alpha, std::span<const double> xi) {
        std::vector<double> point(xi.begin(), xi.end());
        double rad = 0.0;
        for (double v : xi) rad += v * v;
        const double eta = std::max(1e-5, 1e-5 * std::sqrt(rad));
        std::function<cplx(int)> rec = [&](int axis) -> cplx {
            if (axis == g.dim) return multiplier(point);
            const int k = alpha[axis];
            if (k == 0) return rec(axis + 1);
            cplx acc(0.0);
            const double saved = point[axis];
            long coef = 1;
            for (int j = 0; j <= k; ++j) {
                point[axis] = saved + (k - 2 * j) * eta;
                acc += static_cast<double>(coef) * ((j % 2) ? -1.0 : 1.0) * rec(axis + 1);
                coef = coef * (k - j) / (j + 1);
            }
            point[axis] = saved;
            return acc / std::pow(2.0 * eta, k);
        };
        return rec(0);
    };

    std::vector<std::vector<int>> alphas;
    {
        std::vector<int> a(g.dim, 0);
        std::function<void(int, int)> rec = [&](int axis, int left) {
            if (axis == g.dim - 1) {
                a[axis] = left;
                alphas.push_back(a);
                return;
            }
            for (int v = 0; v <= left; ++v) {
                a[axis] = v;
                rec(axis + 1, left - v);
            }
        };
        for (int k = 0; k <= g.dim; ++k) rec(0, k);
    }

    double worst = 0.0;
    for (int jr = g.band_lo; jr <= g.band_hi; ++jr) {
        const double radius = std::pow(2.0, jr);
        for (const auto& alpha : alphas) {
            int order = 0;
            for (int v : alpha) order += v;
            double annulus = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double r = std::sqrt(g.freq_norm2(i));
                if (r <= radius || r >= 2.0 * radius) continue;
                std::array<double, 3> xi{};
                auto sl = g.unflatten(i);
                for (int a2 = 0; a2 < g.dim; ++a2) xi[a2] = g.freq_of_slot(sl[a2]);
                const cplx d = derivative(alpha, std::span<const double>(xi.data(), g.dim));
                annulus += std::norm(d);
            }
            annulus *= g.freq_cell_volume();
            const double term =
                std::sqrt(std::pow(radius, 2.0 * order - g.dim) * annulus);
            worst = std::max(worst, term);
        }
    }
    return worst;
}

} // namespace psv
