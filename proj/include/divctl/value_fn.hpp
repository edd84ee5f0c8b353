#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "divctl/model.hpp"
#include "divctl/thresholds.hpp"

namespace divctl::value {

using model::ModelParams;
using thresholds::Regime;
using thresholds::ThresholdSolution;

/// Three-branch representation of the candidate value function V.
/// TwoThreshold:
///   [0, u1]   e^{-rho D} { beta (1 - p(x,D)) + h(x,D) }
///   (u1, u2]  V0(x + u0 - u2)
///   (u2, inf) x - u2 + mu/rho
/// BarrierOnly: the V0 branch on [0, u0] and the linear branch beyond.
class PiecewiseValue {
  public:
    PiecewiseValue(const ModelParams& params, const ThresholdSolution& sol,
                   bool validate = true);

    /// V and derivatives; order in {0,1,2}.  At x = u1 the intervention
    /// branch applies (the branches agree through first order there).
    double eval(double x, int order = 0) const;
    double operator()(double x) const { return eval(x, 0); }

    /// Branch evaluators extended to all x >= 0, for one-sided probes.
    double intervention_branch(double x, int order = 0) const;
    double continuation_branch(double x, int order = 0) const;

    const ModelParams& params() const { return params_; }
    const model::BarrierSolution& barrier() const { return barrier_; }
    Regime regime() const { return regime_; }
    double u1() const { return u1_; }
    double u2() const { return u2_; }
    /// Coefficient mu/rho - u2 - K of (1 - p) in MV (equals beta* in the
    /// two-threshold regime, up to the fixed-point residual).
    double m_coefficient() const { return mcoef_; }

  private:
    ModelParams params_;
    model::BarrierSolution barrier_;
    Regime regime_;
    double u1_;
    double u2_;
    double vcoef_;  // beta* used by the intervention branch of V
    double mcoef_;  // mu/rho - u2 - K used by MV
};

PiecewiseValue assemble_value(const ModelParams& params,
                              const ThresholdSolution& sol,
                              bool validate = true);

/// MV(x) = e^{-rho D} { (mu/rho - u2 - K)(1 - p(x,D)) + h(x,D) }; the inner
/// supremum is resolved analytically by concavity of V (optimal reset to u2).
double m_operator(const ModelParams& params, const PiecewiseValue& v, double x);

/// (A - rho)V at x, branch-analytic.  side < 0 forces the intervention
/// branch, side > 0 the continuation/linear branch; side = 0 uses the branch
/// that owns x (intervention at x = u1).
double generator_residual(const ModelParams& params, const PiecewiseValue& v,
                          double x, int side = 0);

struct GridSpec {
    double x_max_mult = 3.0;   ///< grid covers [0, x_max_mult * u2]
    int n_uniform = 2048;
    int n_refine = 64;         ///< clustered points at each branch joint
    double refine_band = 1e-3; ///< relative width of the refinement bands
};

struct BellmanReport {
    std::vector<double> grid;
    double residual_a;  ///< |V(0)|
    double residual_b;  ///< max over grid of MV - V
    double residual_c;  ///< max over grid of (A - rho)V
    double residual_d;  ///< max over grid of 1 - V'
    double residual_e;  ///< max normalized triple product (complementarity)
    double complementarity;
    bool passes(double tol_abs, double tol_product) const;
};

BellmanReport bellman_verify(const ModelParams& params, const PiecewiseValue& v,
                             const GridSpec& grid = {});

/// One-sided second derivatives of V at u1 (left from the intervention
/// branch, right from the V0 branch); left < right when u1 > 0.
std::pair<double, double> c2_jump_at_u1(const ModelParams& params,
                                        const PiecewiseValue& v);

}  // namespace divctl::value
