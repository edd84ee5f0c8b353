#pragma once

#include <json.hpp>

#include "divctl/model.hpp"
#include "divctl/simulate.hpp"
#include "divctl/thresholds.hpp"
#include "divctl/value_fn.hpp"

namespace divctl {

inline constexpr const char* kVersion = "0.1.0";

/// Parse the flat key-value config {mu, sigma, rho, K, Delta}; throws
/// std::invalid_argument on missing keys or invalid values.
model::ModelParams params_from_json(const nlohmann::json& j);

nlohmann::json params_to_json(const model::ModelParams& params);
nlohmann::json to_json(const thresholds::ThresholdSolution& sol);
nlohmann::json to_json(const value::BellmanReport& report,
                       const model::ModelParams& params);
nlohmann::json to_json(const simulate::SimulationEstimate& est);

}  // namespace divctl
