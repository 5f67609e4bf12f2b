#pragma once

#include <string>

#include "json.hpp"
#include "psv/lp_frame.hpp"
#include "psv/measure.hpp"
#include "psv/propagator.hpp"
#include "psv/symbol.hpp"
#include "psv/verify.hpp"
#include "psv/weight.hpp"

// JSON config parsing and report emission. Parse errors carry a JSON
// pointer to the offending field. All float formatting is fixed-width
// (%.17g) so reports are byte-identical across runs and worker counts.

namespace psv::io {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& pointer, const std::string& what)
        : std::runtime_error(what + " (at " + pointer + ")"), pointer(pointer) {}
    std::string pointer;
};

Symbol parse_symbol(const json& j, const std::string& ptr = "/symbol");
Weight parse_weight(const json& j, const std::string& ptr = "/weight");
TimeMeasure parse_measure(const json& j, const std::string& ptr = "/measure");
NormSpec parse_norm_spec(const json& j, const SpectralGrid& g, const std::string& ptr = "");
DyadicSequence parse_sequence(const json& j, int j_lo, int j_hi, const std::string& ptr);
Scenario parse_scenario(const json& j);
ForcingSpec parse_forcing(const json& j, const std::string& ptr = "/forcing");
KernelSweep parse_sweep(const json& j);

std::string format_double(double v);

json estimate_report_json(const EstimateReport& rep);
std::string estimate_report_csv(const EstimateReport& rep);
json kernel_report_json(const KernelBoundReport& rep);
std::string kernel_report_csv(const KernelBoundReport& rep);

void write_text(const std::string& path, const std::string& content);

} // namespace psv::io
