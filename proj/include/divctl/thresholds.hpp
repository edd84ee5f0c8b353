#pragma once

#include <vector>

#include "divctl/model.hpp"

namespace divctl::thresholds {

using model::ModelParams;

enum class Regime { BarrierOnly, TwoThreshold };

/// Solved thresholds for an instance.  BarrierOnly when
/// K >= mu/rho - u0 - beta(Delta); then u1 = 0 and u2 = u0.  Otherwise the
/// two-threshold policy with beta_star solving
/// beta + u2(beta, Delta) = mu/rho - K.
struct ThresholdSolution {
    Regime regime;
    double beta_star;    ///< NaN in the BarrierOnly regime
    double u1;
    double u2;
    double delta0;       ///< regime boundary; NaN when K >= mu/rho - u0
    double beta_delta;   ///< beta(Delta) for the instance
    double t2_residual;  ///< |beta_star + u2 - (mu/rho - K)|
};

/// Residuals of the tangency system at a candidate (beta, delta):
///   value: beta(1 - p(u1)) + h(u1) - e^{rho delta} V0(u1 - u2 + u0)
///   slope: -beta dp/dx(u1) + dh/dx(u1) - e^{rho delta} V0'(u1 - u2 + u0)
struct TangencySystem {
    double beta;
    double delta;
    double residual_value;
    double residual_slope;
};

struct TangencyPoint {
    double u1;
    double u2;
    double residual_value;
    double residual_slope;
    int newton_iterations;
    bool used_fallback;
};

/// Solves the coupled tangency system for (u1, u2) at fixed beta > beta(delta).
/// Damped Newton from the small-delay asymptotic seed, with a nested-bisection
/// fallback on the envelope formulation.  Throws solver_error on divergence
/// (near-degenerate beta close to beta(delta)).
TangencyPoint solve_tangency(const ModelParams& params, double beta,
                             double delta);

/// u2(beta, delta): u0 when beta <= beta(delta), else the supremum of all z
/// such that beta(1-p(x,delta)) + h(x,delta) <= e^{rho delta} V0(x - z + u0)
/// for all x >= 0, obtained from the tangency solve.
double u2_of_beta(const ModelParams& params, double beta, double delta);

/// The unique touching point of the envelope; requires beta > beta(delta).
double u1_of_beta(const ModelParams& params, double beta, double delta);

/// Residuals of the tangency equations at given (u1, u2); diagnostic helper.
TangencySystem tangency_residuals(const ModelParams& params, double beta,
                                  double delta, double u1, double u2);

/// Classifies the regime and, in TwoThreshold, solves the fixed point by
/// bisection on the strictly increasing beta + u2(beta, Delta).
ThresholdSolution solve_fixed_point(const ModelParams& params);

/// The unique root z of V0(z) = z + mu/rho - K - u0, the small-delay limit of
/// u0 - u2.  Requires K < mu/rho - u0.
double u_hat_cost(const ModelParams& params);

struct AsymptoticRow {
    double delta;
    double u1;
    double u2;
    double ratio_u1;  ///< u1 / (sigma sqrt(delta) |ln delta|^{1/2})
    double ratio_u2;  ///< (u2 - (u0 - u_hat_K)) / (sigma sqrt(delta) |ln delta|^{1/2})
};

/// Small-delay scaling table; deltas must be positive and decreasing, all
/// below the regime boundary for the asymptotics to be meaningful.
std::vector<AsymptoticRow> asymptotic_check(const ModelParams& params,
                                            const std::vector<double>& deltas);

}  // namespace divctl::thresholds
