#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "divctl/model.hpp"

namespace divctl::heatlab {

using model::ModelParams;

/// Right-edge closure u_x = robin_coef * u + slope, discretized with a ghost
/// node so the interior scheme stays second order.  Fitted from the analytic
/// far field of the profile being evolved (slope 1 for h-type, 0 for p-type,
/// exponential log-derivative for gap-type).
struct RightClosure {
    double robin_coef = 0.0;
    double slope = 0.0;
};

struct Profile {
    double dx = 0.0;
    std::vector<double> u;
    double t = 0.0;
    RightClosure right;

    double x(std::size_t i) const { return dx * static_cast<double>(i); }
    double x_max() const { return dx * static_cast<double>(u.size() - 1); }
};

using LeftBoundary = std::function<double(double)>;
using InitialData = std::function<double(double)>;

/// Uniform grid profile on [0, x_max] sampled from f at time t0.
Profile make_profile(double x_max, int n_cells, double t0, const InitialData& f,
                     RightClosure right = {});

/// Fit a Robin coefficient u_x/u at the right edge from the initial data.
RightClosure fit_robin_closure(const Profile& profile);

/// Crank-Nicolson evolution of du/dt = (sigma^2/2) u_xx + mu u_x from
/// profile.t to t_end with left Dirichlet data; unconditionally stable,
/// second order in space and time (accuracy budget dt <= dx).  Throws
/// solver_error when the solution norm blows up.
Profile evolve(const ModelParams& params, Profile profile,
               const LeftBoundary& left, double t_end, double dt);

struct CrossingReport {
    double time;
    int n_sign_changes;
    std::vector<double> locations;  ///< linearly interpolated
    std::vector<double> slopes;     ///< centered differences at the crossing
};

/// Sign changes of the profile; samples below 1e-12 of the profile scale are
/// treated as zero and merged into adjacent intervals.
CrossingReport count_crossings(const Profile& profile);

/// Evolve and report crossings at each sample time (ascending).
std::vector<CrossingReport> check_single_crossing(
    const ModelParams& params, Profile initial, const LeftBoundary& left,
    const std::vector<double>& t_samples, double dt);

enum class PositiveSetKind { Empty, PointOrDegenerate, Interval, Disconnected };

struct PositivityReport {
    double time;
    PositiveSetKind kind;
    double lo;
    double hi;
    bool interior_strictly_positive;
};

std::vector<PositivityReport> check_interval_positivity(
    const ModelParams& params, Profile initial, const LeftBoundary& left,
    const std::vector<double>& t_samples, double dt);

struct NondegeneracyReport {
    double time;
    bool has_crossing;
    double location;
    double oriented_slope;  ///< slope signed so nondegeneracy means > 0
};

/// Nondegeneracy of the unique zero: the centered-difference slope at the
/// crossing, oriented by the initial sign pattern so a nondegenerate crossing
/// reports a strictly positive value.
std::vector<NondegeneracyReport> check_nondegenerate_crossing(
    const ModelParams& params, Profile initial, const LeftBoundary& left,
    const std::vector<double>& t_samples, double dt);

/// Discrete x-derivative profile (centered differences), for crossing
/// analysis of du/dx.
Profile derivative_profile(const Profile& profile);

void write_csv(const Profile& profile, std::ostream& os);

}  // namespace divctl::heatlab
