#include "divctl/passage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "divctl/gauss.hpp"
#include "divctl/quadrature.hpp"

namespace divctl::passage {

namespace {

void check_domain(double x, double t) {
    if (!(x >= 0.0) || !(t > 0.0))
        throw std::invalid_argument("passage: require x >= 0 and t > 0");
}

// exp(-2 mu x / sigma^2) * Phi((mu t - x)/(sigma sqrt t)), the reflected
// Green's-function tail.  Underflows cleanly to 0 for large x.
double reflected_tail(const ModelParams& p, double x, double t) {
    const double c = 2.0 * p.mu * x / (p.sigma * p.sigma);
    if (c > 745.0) return 0.0;
    const double b = (p.mu * t - x) / (p.sigma * std::sqrt(t));
    return std::exp(-c) * norm_cdf(b);
}

double quad_tol(double t) { return 1e-10 * (1.0 + t); }

}  // namespace

double hitting_prob(const ModelParams& p, double x, double t) {
    check_domain(x, t);
    const double a = (x + p.mu * t) / (p.sigma * std::sqrt(t));
    const double v = norm_sf(a) + reflected_tail(p, x, t);
    return std::clamp(v, 0.0, 1.0);
}

double hitting_prob_dx(const ModelParams& p, double x, double t) {
    check_domain(x, t);
    const double st = p.sigma * std::sqrt(t);
    const double a = (x + p.mu * t) / st;
    return -2.0 * norm_pdf(a) / st -
           2.0 * p.mu / (p.sigma * p.sigma) * reflected_tail(p, x, t);
}

double hitting_prob_dxx(const ModelParams& p, double x, double t) {
    check_domain(x, t);
    const double s2 = p.sigma * p.sigma;
    const double st = p.sigma * std::sqrt(t);
    const double a = (x + p.mu * t) / st;
    return 2.0 * (x + 2.0 * p.mu * t) / (st * s2 * t) * norm_pdf(a) +
           4.0 * p.mu * p.mu / (s2 * s2) * reflected_tail(p, x, t);
}

double hitting_prob_dt(const ModelParams& p, double x, double t) {
    check_domain(x, t);
    const double st = p.sigma * std::sqrt(t);
    const double a = (x + p.mu * t) / st;
    return x / (st * t) * norm_pdf(a);
}

double scale_h(const ModelParams& p, double x, double t) {
    check_domain(x, t);
    if (x == 0.0) return 0.0;
    const double ip = integrate_time(
        [&](double s) { return hitting_prob(p, x, s); }, t, quad_tol(t));
    return x + p.mu * t - p.mu * ip;
}

double scale_h_dx(const ModelParams& p, double x, double t) {
    check_domain(x, t);
    const double ipx = integrate_time(
        [&](double s) { return hitting_prob_dx(p, x, s); }, t, quad_tol(t));
    return 1.0 - p.mu * ipx;
}

double scale_h_dxx(const ModelParams& p, double x, double t) {
    check_domain(x, t);
    const double ipxx = integrate_time(
        [&](double s) { return hitting_prob_dxx(p, x, s); }, t, quad_tol(t));
    return -p.mu * ipxx;
}

double scale_h_dt(const ModelParams& p, double x, double t) {
    return p.mu * (1.0 - hitting_prob(p, x, t));
}

KernelPoint kernel_point(const ModelParams& p, double x, double t) {
    return {x, t, hitting_prob(p, x, t), hitting_prob_dx(p, x, t),
            hitting_prob_dxx(p, x, t)};
}

ScalePoint scale_point(const ModelParams& p, double x, double t) {
    return {x, t, scale_h(p, x, t), scale_h_dx(p, x, t)};
}

}  // namespace divctl::passage
