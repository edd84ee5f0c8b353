#pragma once

#include "divctl/model.hpp"

namespace divctl::passage {

using model::ModelParams;

/// First-passage distribution p(x,t) = P(tau_x < t) for the drifted diffusion
/// absorbed at 0.  Closed form: two Gaussian tails of the Dirichlet Green's
/// function,
///   p(x,t) = Phi(-(x + mu t)/(sigma sqrt t))
///          + exp(-2 mu x / sigma^2) Phi((mu t - x)/(sigma sqrt t)).
/// Limits: p(0+, t) = 1, p(x, 0+) = 0 for x > 0.
double hitting_prob(const ModelParams& params, double x, double t);

/// dp/dx <= 0, strictly negative at x = 0.
double hitting_prob_dx(const ModelParams& params, double x, double t);

/// d2p/dx2 >= 0 (p is convex in x).
double hitting_prob_dxx(const ModelParams& params, double x, double t);

/// dp/dt >= 0; equals the first-passage density x phi(.)/(sigma t^{3/2}).
double hitting_prob_dt(const ModelParams& params, double x, double t);

/// Scale-type function h(x,t) = x + mu t - mu * Int_0^t p(x,s) ds.
/// The time integral uses adaptive quadrature with the s = w^2 substitution
/// near s = 0; absolute tolerance 1e-10 * (1 + t).
double scale_h(const ModelParams& params, double x, double t);

/// dh/dx = 1 - mu * Int_0^t dp/dx(x,s) ds; the integrand has an integrable
/// 1/sqrt(s) singularity at x = 0.
double scale_h_dx(const ModelParams& params, double x, double t);

/// d2h/dx2 = -mu * Int_0^t d2p/dx2(x,s) ds, <= 0 (h is concave in x).
double scale_h_dxx(const ModelParams& params, double x, double t);

/// dh/dt = mu (1 - p(x,t)), exact.
double scale_h_dt(const ModelParams& params, double x, double t);

struct KernelPoint {
    double x;
    double t;
    double p;
    double dp_dx;
    double d2p_dx2;
};

struct ScalePoint {
    double x;
    double t;
    double h;
    double dh_dx;
};

KernelPoint kernel_point(const ModelParams& params, double x, double t);
ScalePoint scale_point(const ModelParams& params, double x, double t);

}  // namespace divctl::passage
