#include "psv/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "psv/fft.hpp"
#include "psv/reduce.hpp"
#include "psv/simd/kernels.hpp"

namespace psv {
namespace {

// parity of the summed multi-index; carries the e^{i pi k} phase from the
// -L offset of the first node
int slot_parity(const SpectralGrid& g, std::size_t idx) {
    int par = 0;
    auto s = g.unflatten(idx);
    for (int a = 0; a < g.dim; ++a) par ^= (s[a] & 1);
    return par;
}

double two_pi_pow(const SpectralGrid& g) { return std::pow(2.0 * M_PI, -0.5 * g.dim); }

} // namespace

SpectralField SpectralField::from_values(const SpectralGrid& g, std::vector<cplx> values) {
    if (values.size() != g.size()) throw std::invalid_argument("field size mismatch");
    std::vector<cplx> spec = values;
    dft_forward(g, spec.data());
    const double scale = g.cell_volume() * two_pi_pow(g);
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] *= slot_parity(g, i) ? -scale : scale;
    return SpectralField(g, std::move(values), std::move(spec));
}

SpectralField SpectralField::from_spectrum(const SpectralGrid& g, std::vector<cplx> spectrum) {
    if (spectrum.size() != g.size()) throw std::invalid_argument("spectrum size mismatch");
    std::vector<cplx> vals(spectrum.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        vals[i] = slot_parity(g, i) ? -spectrum[i] : spectrum[i];
    dft_backward(g, vals.data());
    const double scale = g.freq_cell_volume() * two_pi_pow(g);
    simd::active_kernels().cscale(vals.data(), vals.data(), cplx(scale, 0.0), vals.size());
    return SpectralField(g, std::move(vals), std::move(spectrum));
}

SpectralField SpectralField::multiplied(const std::vector<cplx>& mult) const {
    if (mult.size() != spectrum_.size()) throw std::invalid_argument("multiplier size mismatch");
    std::vector<cplx> spec(spectrum_.size());
    simd::active_kernels().cmul(spec.data(), spectrum_.data(), mult.data(), spec.size());
    return from_spectrum(grid_, std::move(spec));
}

double SpectralField::l2_values() const {
    return std::sqrt(pairwise_abs2_sum(values_) * grid_.cell_volume());
}

double SpectralField::l2_spectrum() const {
    return std::sqrt(pairwise_abs2_sum(spectrum_) * grid_.freq_cell_volume());
}

double weighted_lp_norm_values(const SpectralGrid& g, const std::vector<cplx>& values, double p,
                               const std::vector<double>& w_nodes) {
    if (p < 1.0) throw std::invalid_argument("weighted_lp_norm: p must be >= 1");
    if (w_nodes.size() != values.size()) throw std::invalid_argument("weight table size mismatch");
    const double vol = g.cell_volume();
    if (p == 2.0) {
        return std::sqrt(pairwise_weighted_abs2_sum(w_nodes, values) * vol);
    }
    // general p: |f|^p terms assembled once, then the fixed-shape pairwise sum
    std::vector<double> terms(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        terms[i] = w_nodes[i] * std::pow(std::abs(values[i]), p);
    return std::pow(pairwise_sum(terms) * vol, 1.0 / p);
}

double weighted_lp_norm(const SpectralField& f, double p, const std::vector<double>& w_nodes) {
    return weighted_lp_norm_values(f.grid(), f.values(), p, w_nodes);
}

double weighted_lp_norm(const SpectralField& f, double p, const std::optional<Weight>& w) {
    if (!w || w->kind == Weight::Kind::unit) {
        if (p < 1.0) throw std::invalid_argument("weighted_lp_norm: p must be >= 1");
        if (p == 2.0) return f.l2_values();
        std::vector<double> terms(f.values().size());
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::abs(f.values()[i]), p);
        return std::pow(pairwise_sum(terms) * f.grid().cell_volume(), 1.0 / p);
    }
    return weighted_lp_norm(f, p, weight_node_values(*w, f.grid()));
}

void dump_field(const SpectralField& f, const std::string& path, bool spectrum_kind) {
    const auto& data = spectrum_kind ? f.spectrum() : f.values();
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("dump_field: cannot open " + path);
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(cplx)));
    }
    std::ofstream side(path + ".json");
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"dim\": %d, \"n\": %d, \"half_width\": %.17g, \"kind\": \"%s\"}\n",
                  f.grid().dim, f.grid().n, f.grid().half_width,
                  spectrum_kind ? "spectrum" : "values");
    side << buf;
}

} // namespace psv
