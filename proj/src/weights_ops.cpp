#include "psv/weights_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "psv/reduce.hpp"

namespace psv {
namespace {

// Applies fn(base, stride) for every lattice line along `axis`.
template <class F>
void for_each_line(const SpectralGrid& g, int axis, const F& fn) {
    const int n = g.n;
    std::size_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= static_cast<std::size_t>(n);
    // lines are indexed by all coordinates except `axis`
    std::size_t outer = 1;
    for (int a = 0; a < g.dim; ++a)
        if (a != axis) outer *= static_cast<std::size_t>(n);

    std::array<int, 3> coord{0, 0, 0};
    for (std::size_t li = 0; li < outer; ++li) {
        std::size_t rest = li;
        for (int a = g.dim - 1; a >= 0; --a) {
            if (a == axis) continue;
            coord[a] = static_cast<int>(rest % n);
            rest /= n;
        }
        coord[axis] = 0;
        std::size_t base = 0;
        for (int a = 0; a < g.dim; ++a) base = base * n + coord[a];
        fn(base, stride);
    }
}

// circular sliding sum with half-width K along one axis, in place via scratch
void sliding_sum_axis(const SpectralGrid& g, int axis, int K, std::vector<double>& data,
                      std::vector<double>& scratch) {
    const int n = g.n;
    scratch.resize(data.size());
    for_each_line(g, axis, [&](std::size_t base, std::size_t stride) {
        double acc = 0.0;
        for (int k = -K; k <= K; ++k) acc += data[base + ((k + n) % n) * stride];
        for (int c = 0; c < n; ++c) {
            scratch[base + c * stride] = acc;
            const int out = (c - K + n) % n;
            const int in = (c + K + 1) % n;
            acc += data[base + in * stride] - data[base + out * stride];
        }
    });
    data.swap(scratch);
}

// circular sliding max with half-width K along one axis (monotone deque on
// the doubled line)
void sliding_max_axis(const SpectralGrid& g, int axis, int K, std::vector<double>& data,
                      std::vector<double>& scratch) {
    const int n = g.n;
    scratch.resize(data.size());
    for_each_line(g, axis, [&](std::size_t base, std::size_t stride) {
        std::deque<int> dq;  // positions in the doubled line, values decreasing
        auto value = [&](int pos) { return data[base + (pos % n) * stride]; };
        // window for output c covers positions [c, c+2K] of the line shifted
        // by -K; process doubled indices
        int head = 0;
        for (int pos = 0; pos < n + 2 * K; ++pos) {
            while (!dq.empty() && value(dq.back()) <= value(pos)) dq.pop_back();
            dq.push_back(pos);
            if (pos - head > 2 * K) {
                if (dq.front() == head) dq.pop_front();
                ++head;
            }
            if (pos >= 2 * K) {
                const int c = (pos - 2 * K + K) % n;  // window center
                scratch[base + c * stride] = value(dq.front());
            }
        }
    });
    data.swap(scratch);
}

std::vector<double> abs_table(const std::vector<cplx>& values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::abs(values[i]);
    return out;
}

double cube_count(int K, int dim) {
    double c = 1.0;
    for (int a = 0; a < dim; ++a) c *= (2.0 * K + 1.0);
    return c;
}

} // namespace

BallFamily dyadic_ball_family(const SpectralGrid& g, int l_min, int l_max) {
    const int top = static_cast<int>(std::log2(g.n)) - 2;
    if (l_max < 0) l_max = top;
    l_max = std::min(l_max, top);
    if (l_min < 0 || l_min > l_max) throw std::invalid_argument("dyadic_ball_family: bad level range");
    BallFamily fam;
    for (int l = l_min; l <= l_max; ++l) fam.radii_nodes.push_back(1 << l);
    return fam;
}

ApEstimate ap_constant_estimate(const Weight& w, double p, const SpectralGrid& g,
                                const BallFamily& family) {
    if (!(p > 1.0)) throw std::invalid_argument("ap_constant_estimate: p must be > 1");
    if (family.radii_nodes.empty())
        throw std::invalid_argument("ap_constant_estimate: empty ball family");

    const auto w_tab = weight_node_values(w, g);
    const auto dual_tab = dual_weight_node_values(w, p, g);

    ApEstimate out;
    out.radii_nodes = family.radii_nodes;
    std::vector<double> scratch;
    for (int K : family.radii_nodes) {
        std::vector<double> sw = w_tab, sd = dual_tab;
        for (int a = 0; a < g.dim; ++a) {
            sliding_sum_axis(g, a, K, sw, scratch);
            sliding_sum_axis(g, a, K, sd, scratch);
        }
        const double cnt = cube_count(K, g.dim);
        double worst = 0.0;
        for (std::size_t i = 0; i < sw.size(); ++i) {
            const double prod = (sw[i] / cnt) * std::pow(sd[i] / cnt, p - 1.0);
            if (prod > worst) worst = prod;
        }
        out.per_radius.push_back(worst);
        out.estimate = std::max(out.estimate, worst);
    }
    const auto [lo, hi] = std::minmax_element(out.per_radius.begin(), out.per_radius.end());
    out.divergence_ratio = (*lo > 0.0) ? *hi / *lo : std::numeric_limits<double>::infinity();
    return out;
}

double regularity_constant_closed_form(double b, double p, int dim) {
    if (!Weight::power_in_ap(b, p, dim))
        throw std::invalid_argument("regularity constant: |x|^b is not in A_p for this (b, p, d)");
    return std::min(2.0, dim * p / (dim + b));
}

std::function<int(double)> heuristic_membership(const Weight& w, const SpectralGrid& g) {
    return [w, g](double q) -> int {
        auto est = ap_constant_estimate(w, q, g, dyadic_ball_family(g));
        if (est.divergence_ratio > 4.0) return 0;
        if (est.divergence_ratio >= 2.0) return -1;
        return 1;
    };
}

RegularityResult regularity_constant_bisect(const Weight& w, double p, const SpectralGrid& g,
                                            const std::function<int(double)>& membership) {
    (void)w;
    (void)g;
    RegularityResult res;
    auto probe = [&](double p0) {
        const double q = p / p0;
        if (q <= 1.0) return 0;  // A_q defined only for q > 1
        return membership(q);
    };
    if (int m = probe(2.0); m != 0) {
        res.undecided = m < 0;
        res.r = 2.0;
    } else {
        double lo = 1.0, hi = 2.0;  // member at lo+ (w in A_p), not at hi
        for (int it = 0; it < 24; ++it) {
            const double mid = 0.5 * (lo + hi);
            const int m2 = probe(mid);
            if (m2 < 0) res.undecided = true;
            if (m2 == 1)
                lo = mid;
            else
                hi = mid;
        }
        res.r = 0.5 * (lo + hi);
        if (!(res.r > 1.0)) res.r = 1.0 + 1e-9;
    }
    res.order = static_cast<int>(std::floor(g.dim / res.r)) + 2;
    // near a floor breakpoint both candidate orders are reported
    const double ratio = g.dim / res.r;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) < 1e-6 && nearest >= 1.0) {
        const int cand_lo = static_cast<int>(nearest) + 1;  // floor landed below
        const int cand_hi = static_cast<int>(nearest) + 2;  // floor landed on it
        res.alt_order = res.order == cand_hi ? cand_lo : cand_hi;
    }
    return res;
}

RegularityResult regularity_constant(const Weight& w, double p, const SpectralGrid& g) {
    if (w.kind == Weight::Kind::unit) {
        RegularityResult res;
        res.r = 2.0;
        res.order = g.dim / 2 + 2;
        return res;
    }
    if (w.kind == Weight::Kind::power) {
        // closed-form membership is the oracle for power weights
        const double b = w.b;
        const int dim = g.dim;
        if (!Weight::power_in_ap(b, p, dim))
            throw std::invalid_argument("regularity constant: |x|^b is not in A_p");
        auto member = [b, dim](double q) -> int { return Weight::power_in_ap(b, q, dim) ? 1 : 0; };
        auto res = regularity_constant_bisect(w, p, g, member);
        // snap to the closed form (bisection localizes the same boundary)
        res.r = regularity_constant_closed_form(b, p, dim);
        res.order = static_cast<int>(std::floor(dim / res.r)) + 2;
        const double ratio = dim / res.r;
        const double nearest = std::round(ratio);
        if (std::abs(ratio - nearest) < 1e-6 && nearest >= 1.0) {
            const int cand_lo = static_cast<int>(nearest) + 1;
            const int cand_hi = static_cast<int>(nearest) + 2;
            res.alt_order = res.order == cand_hi ? cand_lo : cand_hi;
        }
        return res;
    }
    return regularity_constant_bisect(w, p, g, heuristic_membership(w, g));
}

std::vector<double> maximal_function(const SpectralGrid& g, const std::vector<cplx>& values) {
    if (values.size() != g.size()) throw std::invalid_argument("maximal_function: size mismatch");
    auto out = abs_table(values);  // K = 0 window is the node itself
    const auto base = out;
    const int k_max = g.n / 4;
    std::vector<double> scratch;
    for (int K = 1; K <= k_max; ++K) {
        std::vector<double> avg = base;
        for (int a = 0; a < g.dim; ++a) sliding_sum_axis(g, a, K, avg, scratch);
        const double cnt = cube_count(K, g.dim);
        for (auto& v : avg) v /= cnt;
        for (int a = 0; a < g.dim; ++a) sliding_max_axis(g, a, K, avg, scratch);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], avg[i]);
    }
    return out;
}

std::vector<double> sharp_function(const SpectralGrid& g, const std::vector<cplx>& values) {
    if (values.size() != g.size()) throw std::invalid_argument("sharp_function: size mismatch");
    const int n = g.n;
    std::vector<double> out(values.size(), 0.0);
    std::vector<double> scratch;

    // window means via sliding sums (real and imaginary parts)
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        re[i] = values[i].real();
        im[i] = values[i].imag();
    }

    for (int K = 1; K <= n / 4; K *= 2) {
        std::vector<double> mre = re, mim = im;
        for (int a = 0; a < g.dim; ++a) {
            sliding_sum_axis(g, a, K, mre, scratch);
            sliding_sum_axis(g, a, K, mim, scratch);
        }
        const double cnt = cube_count(K, g.dim);
        const int stride_c = g.dim == 1 ? 1 : std::max(1, K / 2);

        // oscillation of each sampled window, painted onto the nodes it covers
        if (g.dim == 1) {
            for (int c = 0; c < n; c += stride_c) {
                const cplx mean(mre[c] / cnt, mim[c] / cnt);
                double acc = 0.0;
                for (int k = -K; k <= K; ++k) acc += std::abs(values[(c + k + n) % n] - mean);
                const double osc = acc / cnt;
                for (int k = -K; k <= K; ++k) {
                    const int idx = (c + k + n) % n;
                    out[idx] = std::max(out[idx], osc);
                }
            }
        } else {
            // strided centers: a sampled supremum (lower bound, as recorded
            // in reports)
            const std::size_t total = g.size();
            std::vector<std::size_t> offsets;
            {
                // precompute cube offsets once per K
                const int w = 2 * K + 1;
                std::size_t cube = 1;
                for (int a = 0; a < g.dim; ++a) cube *= static_cast<std::size_t>(w);
                offsets.reserve(cube);
                for (std::size_t o = 0; o < cube; ++o) offsets.push_back(o);
            }
            for (std::size_t ci = 0; ci < total; ++ci) {
                auto cc = g.unflatten(ci);
                bool on_stride = true;
                for (int a = 0; a < g.dim; ++a) on_stride = on_stride && cc[a] % stride_c == 0;
                if (!on_stride) continue;
                const cplx mean(mre[ci] / cnt, mim[ci] / cnt);
                double acc = 0.0;
                const int w = 2 * K + 1;
                for (std::size_t o = 0; o < offsets.size(); ++o) {
                    std::size_t rest = o, idx = 0;
                    for (int a = 0; a < g.dim; ++a) {
                        const int off = static_cast<int>(rest % w) - K;
                        rest /= w;
                        idx = idx * n + ((cc[a] + off + n) % n);
                    }
                    acc += std::abs(values[idx] - mean);
                }
                const double osc = acc / cnt;
                for (std::size_t o = 0; o < offsets.size(); ++o) {
                    std::size_t rest = o, idx = 0;
                    for (int a = 0; a < g.dim; ++a) {
                        const int off = static_cast<int>(rest % (2 * K + 1)) - K;
                        rest /= (2 * K + 1);
                        idx = idx * n + ((cc[a] + off + n) % n);
                    }
                    out[idx] = std::max(out[idx], osc);
                }
            }
        }
    }
    return out;
}

double table_lp_norm(const SpectralGrid& g, const std::vector<double>& table, double p,
                     const std::vector<double>& w_nodes) {
    if (p < 1.0) throw std::invalid_argument("table_lp_norm: p must be >= 1");
    std::vector<double> terms(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
        terms[i] = w_nodes[i] * std::pow(std::abs(table[i]), p);
    return std::pow(pairwise_sum(terms) * g.cell_volume(), 1.0 / p);
}

} // namespace psv
