#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psv/field.hpp"
#include "psv/lp_frame.hpp"
#include "psv/measure.hpp"
#include "psv/symbol.hpp"
#include "psv/weight.hpp"

namespace psv {

// Initial-data families the scenarios sweep over.
struct DataFamily {
    enum class Kind { gaussian, dilation, single_block, random_band };
    Kind kind = Kind::gaussian;
    std::vector<double> widths{1.0};        // gaussian widths sigma
    std::vector<double> dilations{1.0};     // u0(lambda x) ladder on a unit gaussian
    std::vector<int> block_levels{2, 3};    // single_block levels J
    unsigned seed = 1;
    int count = 4;                          // random_band members
};

struct Scenario {
    std::string name = "scenario";
    enum class Kind {
        homogeneous_bessel,  // scaled-measure maximal-regularity estimate
        gradient,            // operator + fractional-gradient form
        power_case,          // unscaled t^a mu(dt) form
        second_order,        // second-order coefficients against L_p data
        inhomogeneous        // Duhamel split against density-in-time weights
    };
    Kind kind = Kind::power_case;

    Symbol symbol;
    Weight weight;
    TimeMeasure measure = TimeMeasure::lebesgue();
    double p = 2.0;
    double q = 2.0;
    double a = 0.5;
    // smoothness slope of r(j) = slope * j (table sequences come through the
    // JSON layer as explicit DyadicSequence)
    std::optional<DyadicSequence> smoothness;  // defaults to gamma * j
    int dim = 1;
    int points_per_axis = 1024;
    double half_width = 32.0;
    double horizon = 1.0;
    DataFamily data;
    bool force_solve = false;
};

struct DatumResult {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool hard_violation = false;  // rhs = 0 with lhs > 0
    int refine_rounds = 0;
    bool refine_capped = false;
};

struct EstimateReport {
    std::string scenario;
    std::string kind;
    std::vector<DatumResult> per_datum;
    double max_ratio = 0.0;
    double mu_a_t = 0.0;           // measure factor folded into the bound
    double slope_lhs = 0.0;        // log2 LHS vs block level (block families)
    double recovered_smoothing = 0.0;  // s - slope_lhs / q
    int refine_rounds = 0;         // quadrature pre-flight doublings
    int split_level = 0;
    bool refine_cap_hit = false;
    bool verdict = false;
};

EstimateReport verify_estimate(const Scenario& sc);

// forcing: time-constant spectral field built per grid (single mode or
// band-limited noise); nullopt forcing falls back to verify_estimate
struct ForcingSpec {
    enum class Kind { none, single_mode, random_band };
    Kind kind = Kind::none;
    int mode_slot = 4;
    cplx amplitude{1.0, 0.0};
    unsigned seed = 7;
};
EstimateReport verify_inhomogeneous(const Scenario& sc, const ForcingSpec& forcing);

// data family materialization (shared with the CLI and tests)
std::vector<std::pair<std::string, SpectralField>> build_data_family(const SpectralGrid& g,
                                                                     const LPFrame& frame,
                                                                     const DataFamily& fam);

} // namespace psv
