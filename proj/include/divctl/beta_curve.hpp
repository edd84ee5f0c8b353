#pragma once

#include <utility>
#include <vector>

#include "divctl/model.hpp"

namespace divctl::beta {

using model::ModelParams;

/// The critical intervention level
///   beta(t) = [dh/dx(0,t) - e^{rho t} V0'(0)] / dp/dx(0,t),
/// strictly increasing with beta(0+) = 0 and beta(t) -> infinity.
double beta_of_t(const ModelParams& params, double t);

/// (V0'(0) - 1) * sqrt(pi sigma^2 / 2), the small-t slope of beta against
/// sqrt(t).
double smalltime_coefficient(const ModelParams& params);

/// beta(t) / (sqrt(t) * smalltime_coefficient); tends to 1 as t -> 0.
double beta_smalltime_ratio(const ModelParams& params, double t);

/// The regime boundary Delta0 solving beta(Delta0) = mu/rho - K - u0.
/// Requires K < mu/rho - u0; bracketing bisection to 1e-10 relative.
double solve_delta0(const ModelParams& params);

/// Log-spaced (t, beta(t)) samples for diagnostics.
struct BetaCurve {
    ModelParams params;
    std::vector<std::pair<double, double>> samples;
};

BetaCurve sample_curve(const ModelParams& params, double t_lo, double t_hi,
                       int n);

}  // namespace divctl::beta
