#include "psv/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace psv::io {
namespace {

const json& need(const json& j, const char* key, const std::string& ptr) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ptr + "/" + key, "missing field");
    return *it;
}

double need_num(const json& j, const char* key, const std::string& ptr) {
    const json& v = need(j, key, ptr);
    if (!v.is_number()) throw ConfigError(ptr + "/" + key, "expected a number");
    return v.get<double>();
}

double opt_num(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<double>();
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Symbol parse_symbol(const json& j, const std::string& ptr) {
    const std::string kind = need(j, "kind", ptr).get<std::string>();
    if (kind == "fractional_laplacian" || kind == "heat")
        return fractional_laplacian_symbol(kind == "heat" ? 2.0 : need_num(j, "gamma", ptr));
    if (kind == "relativistic")
        return relativistic_symbol(need_num(j, "gamma", ptr), opt_num(j, "xi_min", 1e-2));
    if (kind == "oscillating_complex")
        return oscillating_complex_symbol(need_num(j, "gamma", ptr), need_num(j, "rho", ptr));
    if (kind == "second_order") {
        const json& pieces_j = need(j, "pieces", ptr);
        if (!pieces_j.is_array() || pieces_j.empty())
            throw ConfigError(ptr + "/pieces", "expected a nonempty array");
        const json& part_j = need(j, "time_partition", ptr);
        std::vector<std::vector<double>> pieces;
        int dim = 1;
        for (const auto& p : pieces_j) {
            if (p.is_number()) {
                pieces.push_back({p.get<double>()});
            } else {
                std::vector<double> mat = p.get<std::vector<double>>();
                dim = static_cast<int>(std::lround(std::sqrt(double(mat.size()))));
                pieces.push_back(std::move(mat));
            }
        }
        return second_order_symbol(dim, std::move(pieces), part_j.get<std::vector<double>>(),
                                   need_num(j, "kappa", ptr), need_num(j, "M", ptr));
    }
    if (kind == "anti_dissipative") {
        // deliberately non-elliptic demo symbol
        Symbol s = fractional_laplacian_symbol(need_num(j, "gamma", ptr));
        s.kind = "anti_dissipative";
        const double gamma = s.order;
        s.evaluate = [gamma](double, std::span<const double> xi) {
            double r2 = 0.0;
            for (double v : xi) r2 += v * v;
            return cplx(std::pow(r2, 0.5 * gamma), 0.0);
        };
        return s;
    }
    throw ConfigError(ptr + "/kind", "unknown symbol kind '" + kind + "'");
}

Weight parse_weight(const json& j, const std::string& ptr) {
    if (j.is_null()) return unit_weight();
    const std::string kind = need(j, "kind", ptr).get<std::string>();
    if (kind == "unit") return unit_weight();
    if (kind == "power") return power_weight(need_num(j, "b", ptr));
    if (kind == "power_product")
        return power_product_weight(need(j, "b", ptr).get<std::vector<double>>());
    throw ConfigError(ptr + "/kind", "unknown weight kind '" + kind + "'");
}

TimeMeasure parse_measure(const json& j, const std::string& ptr) {
    if (j.is_null()) return TimeMeasure::lebesgue();
    TimeMeasure m = TimeMeasure::lebesgue();
    bool have_density = false;
    if (auto it = j.find("density"); it != j.end() && !it->is_null()) {
        const std::string kind = need(*it, "kind", ptr + "/density").get<std::string>();
        if (kind == "power") {
            m = TimeMeasure::power_density(need_num(*it, "a", ptr + "/density"),
                                           opt_num(*it, "amp", 1.0));
        } else if (kind == "power_sum") {
            m = TimeMeasure::power_sum_density(need_num(*it, "a1", ptr + "/density"),
                                               need_num(*it, "a2", ptr + "/density"));
        } else if (kind == "ainfty_blocks") {
            m = TimeMeasure::ainfty_blocks(opt_num(*it, "v0", 1.0), opt_num(*it, "v1", 2.0));
        } else if (kind == "lebesgue") {
            m = TimeMeasure::lebesgue();
        } else {
            throw ConfigError(ptr + "/density/kind", "unknown density kind '" + kind + "'");
        }
        have_density = true;
    }
    if (auto it = j.find("atoms"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw ConfigError(ptr + "/atoms", "expected an array of [t, mass]");
        if (!have_density) {
            // pure atomic measure: start empty
            TimeMeasure atoms_only = TimeMeasure::dirac(1.0);  // placeholder, replaced below
            bool first = true;
            for (const auto& a : *it) {
                const double t0 = a.at(0).get<double>(), mass = a.at(1).get<double>();
                if (first) {
                    atoms_only = TimeMeasure::dirac(t0, mass);
                    first = false;
                } else {
                    atoms_only = atoms_only.with_atom(t0, mass);
                }
            }
            if (first) throw ConfigError(ptr + "/atoms", "empty measure");
            m = atoms_only;
        } else {
            for (const auto& a : *it)
                m = m.with_atom(a.at(0).get<double>(), a.at(1).get<double>());
        }
    } else if (!have_density) {
        throw ConfigError(ptr, "measure needs a density or atoms");
    }
    if (auto it = j.find("scale"); it != j.end()) m = m.with_scale(it->get<double>());
    return m;
}

DyadicSequence parse_sequence(const json& j, int j_lo, int j_hi, const std::string& ptr) {
    const std::string kind = need(j, "kind", ptr).get<std::string>();
    if (kind == "linear") return linear_sequence(need_num(j, "slope", ptr), j_lo, j_hi);
    if (kind == "constant") return constant_sequence(need_num(j, "value", ptr), j_lo, j_hi);
    if (kind == "table") {
        DyadicSequence s;
        s.j_lo = static_cast<int>(need_num(j, "j_lo", ptr));
        s.vals = need(j, "values", ptr).get<std::vector<double>>();
        s.j_hi = s.j_lo + static_cast<int>(s.vals.size()) - 1;
        if (!s.covers(j_lo, j_hi))
            throw ConfigError(ptr, "table sequence does not cover the resolved band");
        return s;
    }
    throw ConfigError(ptr + "/kind", "unknown sequence kind '" + kind + "'");
}

NormSpec parse_norm_spec(const json& j, const SpectralGrid& g, const std::string& ptr) {
    NormSpec spec;
    spec.p = need_num(j, "p", ptr);
    spec.q = opt_num(j, "q", 2.0);
    const std::string flavor = need(j, "flavor", ptr).get<std::string>();
    if (flavor == "bessel")
        spec.flavor = NormSpec::Flavor::bessel;
    else if (flavor == "besov")
        spec.flavor = NormSpec::Flavor::besov;
    else
        throw ConfigError(ptr + "/flavor", "expected 'bessel' or 'besov'");
    spec.homogeneous = j.value("homogeneous", false);
    spec.smoothness = parse_sequence(need(j, "r", ptr), g.band_lo - 1, g.band_hi + 1, ptr + "/r");
    spec.weight = parse_weight(j.contains("weight") ? j["weight"] : json(), ptr + "/weight");
    return spec;
}

ForcingSpec parse_forcing(const json& j, const std::string& ptr) {
    ForcingSpec f;
    if (j.is_null()) return f;
    const std::string kind = need(j, "kind", ptr).get<std::string>();
    if (kind == "none") return f;
    if (kind == "single_mode") {
        f.kind = ForcingSpec::Kind::single_mode;
        f.mode_slot = static_cast<int>(opt_num(j, "mode_slot", 4));
        f.amplitude = cplx(opt_num(j, "re", 1.0), opt_num(j, "im", 0.0));
        return f;
    }
    if (kind == "random_band") {
        f.kind = ForcingSpec::Kind::random_band;
        f.seed = static_cast<unsigned>(opt_num(j, "seed", 7));
        return f;
    }
    throw ConfigError(ptr + "/kind", "unknown forcing kind '" + kind + "'");
}

Scenario parse_scenario(const json& j) {
    Scenario sc;
    sc.name = j.value("name", "scenario");
    const std::string kind = need(j, "kind", "").get<std::string>();
    if (kind == "homogeneous_bessel")
        sc.kind = Scenario::Kind::homogeneous_bessel;
    else if (kind == "gradient")
        sc.kind = Scenario::Kind::gradient;
    else if (kind == "power_case")
        sc.kind = Scenario::Kind::power_case;
    else if (kind == "second_order")
        sc.kind = Scenario::Kind::second_order;
    else if (kind == "inhomogeneous")
        sc.kind = Scenario::Kind::inhomogeneous;
    else
        throw ConfigError("/kind", "unknown estimate kind '" + kind + "'");

    sc.symbol = parse_symbol(need(j, "symbol", ""), "/symbol");
    sc.weight = parse_weight(j.contains("weight") ? j["weight"] : json(), "/weight");
    if (j.contains("measure")) sc.measure = parse_measure(j["measure"], "/measure");
    sc.p = opt_num(j, "p", 2.0);
    sc.q = opt_num(j, "q", 2.0);
    sc.a = opt_num(j, "a", 0.5);
    if (const auto& gj = need(j, "grid", ""); true) {
        sc.dim = static_cast<int>(opt_num(gj, "dim", 1));
        sc.points_per_axis = static_cast<int>(need_num(gj, "n", "/grid"));
        sc.half_width = need_num(gj, "half_width", "/grid");
    }
    sc.horizon = opt_num(j, "T", 1.0);
    sc.force_solve = j.value("force", false);

    if (j.contains("r")) {
        auto g = make_grid(sc.dim, sc.points_per_axis, sc.half_width);
        sc.smoothness = parse_sequence(j["r"], g.band_lo - 1, g.band_hi + 1, "/r");
    }

    const json& dj = need(j, "data", "");
    const std::string dkind = need(dj, "kind", "/data").get<std::string>();
    if (dkind == "gaussian") {
        sc.data.kind = DataFamily::Kind::gaussian;
        if (dj.contains("widths")) sc.data.widths = dj["widths"].get<std::vector<double>>();
    } else if (dkind == "dilation") {
        sc.data.kind = DataFamily::Kind::dilation;
        if (dj.contains("lambdas")) sc.data.dilations = dj["lambdas"].get<std::vector<double>>();
    } else if (dkind == "single_block") {
        sc.data.kind = DataFamily::Kind::single_block;
        if (dj.contains("levels")) sc.data.block_levels = dj["levels"].get<std::vector<int>>();
    } else if (dkind == "random_band") {
        sc.data.kind = DataFamily::Kind::random_band;
        sc.data.seed = static_cast<unsigned>(opt_num(dj, "seed", 1));
        sc.data.count = static_cast<int>(opt_num(dj, "count", 4));
    } else {
        throw ConfigError("/data/kind", "unknown data family '" + dkind + "'");
    }
    return sc;
}

KernelSweep parse_sweep(const json& j) {
    KernelSweep sw;
    if (j.contains("epsilons")) sw.epsilons = j["epsilons"].get<std::vector<double>>();
    if (j.contains("j_levels")) sw.j_levels = j["j_levels"].get<std::vector<int>>();
    if (j.contains("include_s0")) sw.include_s0 = j["include_s0"].get<bool>();
    if (j.contains("t_times_scale"))
        sw.t_times_scale = j["t_times_scale"].get<std::vector<double>>();
    if (j.contains("s0_times")) sw.s0_times = j["s0_times"].get<std::vector<double>>();
    if (j.contains("p_values")) {
        sw.p_values.clear();
        for (const auto& p : j["p_values"]) {
            if (p.is_string() && p.get<std::string>() == "inf")
                sw.p_values.push_back(std::numeric_limits<double>::infinity());
            else
                sw.p_values.push_back(p.get<double>());
        }
    }
    if (j.contains("nma")) {
        sw.nma.clear();
        for (const auto& row : j["nma"]) {
            std::array<int, 3> alpha{0, 0, 0};
            const auto aj = row.at(2);
            for (std::size_t a = 0; a < aj.size() && a < 3; ++a) alpha[a] = aj.at(a).get<int>();
            sw.nma.emplace_back(row.at(0).get<double>(), row.at(1).get<int>(), alpha);
        }
    }
    sw.s = j.value("s", 0.0);
    sw.delta = j.value("delta", 0.5);
    return sw;
}

json estimate_report_json(const EstimateReport& rep) {
    json out;
    out["scenario"] = rep.scenario;
    out["kind"] = rep.kind;
    out["max_ratio"] = rep.max_ratio;
    out["mu_aT"] = rep.mu_a_t;
    out["slope_diagnostics"] = {{"slope_lhs", rep.slope_lhs},
                                {"recovered_smoothing", rep.recovered_smoothing}};
    out["split_level"] = rep.split_level;
    out["refine_rounds"] = rep.refine_rounds;
    out["verdict"] = rep.verdict ? "pass" : "fail";
    json data = json::array();
    for (const auto& d : rep.per_datum)
        data.push_back({{"id", d.id},
                        {"lhs", d.lhs},
                        {"rhs", d.rhs},
                        {"ratio", d.ratio},
                        {"flags", d.hard_violation ? "hard" : (d.refine_capped ? "refine_cap" : "")}});
    out["data"] = data;
    return out;
}

std::string estimate_report_csv(const EstimateReport& rep) {
    std::string csv = "datum_id,lhs,rhs,ratio,flags\n";
    for (const auto& d : rep.per_datum) {
        csv += d.id + "," + format_double(d.lhs) + "," + format_double(d.rhs) + "," +
               format_double(d.ratio) + ",";
        csv += d.hard_violation ? "hard" : (d.refine_capped ? "refine_cap" : "");
        csv += "\n";
    }
    return csv;
}

json kernel_report_json(const KernelBoundReport& rep) {
    json out;
    out["normalization"] = rep.normalization;
    out["delta"] = rep.delta;
    json cells = json::array();
    for (const auto& c : rep.cells) {
        json cj = {{"epsilon", c.epsilon},
                   {"p", std::isinf(c.p) ? json("inf") : json(c.p)},
                   {"n", c.n},
                   {"m", c.m},
                   {"alpha_code", c.alpha_code},
                   {"rows_used", c.rows_used}};
        if (c.s0) {
            cj["s0"] = true;
            cj["slope"] = c.s0_slope;
        } else {
            cj["tau"] = c.tau;
            cj["max_log2_n_hat"] = c.max_log2_n_hat;
            cj["spread_log2_n_hat"] = c.spread_log2_n_hat;
            cj["max_over_fit"] = c.max_over_fit;
        }
        cells.push_back(cj);
    }
    out["cells"] = cells;
    return out;
}

std::string kernel_report_csv(const KernelBoundReport& rep) {
    std::string csv = "epsilon,j,t,p,n,m,alpha_code,lhs,shape,log2_N_hat,flags\n";
    for (const auto& r : rep.rows) {
        csv += format_double(r.epsilon) + ",";
        csv += r.j == std::numeric_limits<int>::min() ? std::string("S0") : std::to_string(r.j);
        csv += "," + format_double(r.t) + ",";
        csv += std::isinf(r.p) ? std::string("inf") : format_double(r.p);
        csv += "," + format_double(r.n) + "," + std::to_string(r.m) + "," +
               std::to_string(r.alpha_code) + "," + format_double(r.lhs) + "," +
               format_double(r.shape) + "," + format_double(r.log2_n_hat) + ",";
        if (r.tail_flagged) csv += "tail";
        if (r.underflow_excluded) csv += r.tail_flagged ? "|underflow" : "underflow";
        csv += "\n";
    }
    return csv;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

} // namespace psv::io
