#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ulam/experiments.hpp"

namespace ulam {

using json = nlohmann::ordered_json;

// Strict parse: unknown keys anywhere in the document are rejected with a
// ConfigError naming the offending key.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig experiment_config_from_json(const json& j);

json experiment_config_to_json(const ExperimentConfig& cfg);
json report_to_json(const ExperimentReport& report);

// Flat key,value rendering of the report for --format csv.
std::string report_to_csv(const ExperimentReport& report);

// radius,measured_error,bound_value,ratio with 17 significant digits.
std::string curve_to_csv(const std::vector<CurveSample>& curve);

// 17-significant-digit decimal rendering used in all CSV output.
std::string format_g17(double v);

}  // namespace ulam
