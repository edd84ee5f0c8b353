#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "divctl/model.hpp"
#include "divctl/thresholds.hpp"

namespace divctl::simulate {

using model::ModelParams;

enum class PolicyKind { BarrierEps, TwoThresholdEps };

/// An epsilon-lump dividend policy.  BarrierEps pays eps at hits of the
/// barrier u2 (= u0) and never recapitalizes; TwoThresholdEps additionally
/// orders capital at u1, waits the delay, and resets the surplus to u2 at
/// cost K.
struct PolicySpec {
    PolicyKind kind;
    double epsilon;
    double u1;        ///< lower threshold (TwoThresholdEps)
    double u2;        ///< dividend threshold (barrier u0 for BarrierEps)
    double delay;
    double cap_cost;

    void validate(const ModelParams& params) const;
};

PolicySpec barrier_policy(const ModelParams& params,
                          const model::BarrierSolution& barrier, double epsilon);
PolicySpec two_threshold_policy(const ModelParams& params,
                                const thresholds::ThresholdSolution& sol,
                                double epsilon);

struct SimulationEstimate {
    double mean;
    double std_error;
    std::int64_t n_paths;
    std::uint64_t seed;
    double ruin_fraction;
    std::int64_t truncated_paths;
    double truncation_bound;  ///< mean of e^{-rho T_max}(X + mu/rho) over truncated paths
};

struct SimConfig {
    double t_max_over_rho = 40.0;  ///< horizon T_max = t_max_over_rho / rho
    double step_safety = 4.0;      ///< dt = (distance / (step_safety sigma))^2
    double dt_floor_rel = 1e-6;    ///< floor, relative to (width/sigma)^2
    double dt_cap_rel = 0.05;      ///< cap, relative to (width/sigma)^2
    int delay_substeps = 64;       ///< fixed fine steps across the delay window
};

/// Event observer for path traces: (t, X, L cumulative, N cumulative).
using PathObserver = std::function<void(double, double, double, int)>;

/// Monte-Carlo estimate of the policy return from x0.  Paths use exact
/// Gaussian increments with Brownian-bridge crossing corrections at every
/// threshold, so ruin detection carries no first-order discretization bias.
/// Deterministic given (seed, path index); the reduction over paths is
/// sequential in path order regardless of thread count.
SimulationEstimate simulate_policy(const ModelParams& params,
                                   const PolicySpec& policy, double x0,
                                   std::int64_t n_paths, std::uint64_t seed,
                                   const SimConfig& config = {});

/// Single traced path, streaming (t, X, L, N) to the observer.
void simulate_trace(const ModelParams& params, const PolicySpec& policy,
                    double x0, std::uint64_t seed, const PathObserver& observer,
                    const SimConfig& config = {});

/// Closed-form return of the barrier eps-policy:
///   V_eps(x) = [ (V0(u0) - V0(u0-eps)) / eps ]^{-1} V0(x) on (0, u0),
/// extended linearly above u0.
double veps_closed_form_barrier(const ModelParams& params,
                                const model::BarrierSolution& barrier,
                                double epsilon, double x0);

/// Two-sided discounted exit functionals on [u1, u2]:
///   w2(x) = E[e^{-rho tau}; X(tau) = u2], w1 mirrored; w1 + w2 < 1 inside.
std::pair<double, double> exit_functionals(const ModelParams& params, double u1,
                                           double u2, double x);

/// The eps-policy return gap g_eps(u2) = V_eps(u2) - V(u2) < 0.
double g_eps_u2(const ModelParams& params,
                const thresholds::ThresholdSolution& sol, double epsilon);

/// Closed-form return of the two-threshold eps-policy.
double veps_closed_form_twothreshold(const ModelParams& params,
                                     const thresholds::ThresholdSolution& sol,
                                     double epsilon, double x0);

}  // namespace divctl::simulate
