#pragma once

#include <utility>

namespace divctl::model {

/// The five scalars defining a problem instance.
struct ModelParams {
    double mu;        ///< drift rate (capital/time), > 0
    double sigma;     ///< volatility (capital/sqrt(time)), > 0
    double rho;       ///< discount rate (1/time), > 0
    double cap_cost;  ///< fixed issuance cost K (capital), >= 0
    double delay;     ///< issuance delay (time), > 0

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;

    /// Perpetuity level mu/rho, the natural capital scale of the problem.
    double payout_bound() const { return mu / rho; }
};

struct Roots {
    double r1;  ///< positive root of (sigma^2/2) r^2 + mu r - rho = 0
    double r2;  ///< magnitude of the negative root
};

/// Characteristic roots of the generator equation. Both strictly positive:
///   r1 = (-mu + sqrt(mu^2 + 2 sigma^2 rho)) / sigma^2
///   r2 = ( mu + sqrt(mu^2 + 2 sigma^2 rho)) / sigma^2
Roots characteristic_roots(const ModelParams& params);

/// The closed-form barrier solution: the unique dividend barrier u0 with
/// V0(0) = 0 and the coefficients of V0 in the shifted basis
///   V0(x) = c1 exp(r1 (x - u0)) + c2 exp(-r2 (x - u0)),
/// normalized so V0(u0) = mu/rho and V0'(u0) = 1.  The shifted basis keeps
/// exponent magnitudes moderate on the working region [0, u0].
struct BarrierSolution {
    double r1;
    double r2;
    double u0;
    double c1;
    double c2;
    double mu_over_rho;
};

BarrierSolution solve_barrier(const ModelParams& params);

/// V0 and its derivatives; defined on all of R.
/// order 0: value; 1: first derivative; 2: second derivative.
double v0_eval(const BarrierSolution& sol, double x, int order = 0);

/// The unique z with V0(z) = target (V0 is strictly increasing).
/// Safeguarded bisection to 1e-12 * max(1, |target|); target must be >= 0.
double v0_inverse(const BarrierSolution& sol, double target);

}  // namespace divctl::model
