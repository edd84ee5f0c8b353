#include "divctl/json_io.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace divctl {

model::ModelParams params_from_json(const nlohmann::json& j) {
    auto get = [&j](const char* key) {
        if (!j.contains(key) || !j.at(key).is_number())
            throw std::invalid_argument(std::string("config: missing or non-numeric key '") +
                                        key + "'");
        return j.at(key).get<double>();
    };
    model::ModelParams p{get("mu"), get("sigma"), get("rho"), get("K"),
                         get("Delta")};
    p.validate();
    return p;
}

nlohmann::json params_to_json(const model::ModelParams& p) {
    return {{"mu", p.mu},
            {"sigma", p.sigma},
            {"rho", p.rho},
            {"K", p.cap_cost},
            {"Delta", p.delay}};
}

nlohmann::json to_json(const thresholds::ThresholdSolution& s) {
    nlohmann::json j{
        {"regime",
         s.regime == thresholds::Regime::BarrierOnly ? "barrier_only"
                                                     : "two_threshold"},
        {"u1", s.u1},
        {"u2", s.u2},
        {"beta_delta", s.beta_delta},
        {"t2_residual", s.t2_residual},
    };
    j["beta_star"] = std::isfinite(s.beta_star) ? nlohmann::json(s.beta_star)
                                                : nlohmann::json();
    j["delta0"] =
        std::isfinite(s.delta0) ? nlohmann::json(s.delta0) : nlohmann::json();
    return j;
}

nlohmann::json to_json(const value::BellmanReport& r,
                       const model::ModelParams& p) {
    return {{"residual_a", r.residual_a}, {"residual_b", r.residual_b},
            {"residual_c", r.residual_c}, {"residual_d", r.residual_d},
            {"residual_e", r.residual_e}, {"complementarity", r.complementarity},
            {"grid_size", r.grid.size()}, {"params", params_to_json(p)}};
}

nlohmann::json to_json(const simulate::SimulationEstimate& e) {
    return {{"estimate", e.mean},
            {"std_error", e.std_error},
            {"n_paths", e.n_paths},
            {"seed", e.seed},
            {"ruin_fraction", e.ruin_fraction},
            {"truncated_paths", e.truncated_paths},
            {"truncation_bound", e.truncation_bound}};
}

}  // namespace divctl
