#pragma once

#include "saespec/config.hpp"

#include "sae/oracle.hpp"
#include "sae/singular.hpp"
#include "sae/spectra.hpp"

#include <json.hpp>

#include <string>

namespace saespec {

using Json = nlohmann::ordered_json;

/// Finite doubles stay numbers; infinities and NaN become "inf", "-inf", "nan".
Json number(double x);

/// Reads a value written by number().
double read_number(const Json& j);

/// Deterministic text: fixed key order, two-space indent, %.17g floats.
std::string dump(const Json& j);

Json config_json(const RunConfig& config);
Json analysis_json(const sae::RadialProblem& problem);
Json tau_json(const sae::SAEParameter& tau);
Json spectrum_json(const sae::SpectrumResult& spectrum);

/// Shortest %.17g rendering used in CSV cells.
std::string format_double(double x);

} // namespace saespec
