#pragma once

#include <cmath>
#include <utility>

#include "divctl/errors.hpp"

namespace divctl {

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15KronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGK15GaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = kGK15KronrodW[7] * fc;
    double gauss = kGK15GaussW[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGK15Nodes[i];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kGK15KronrodW[i] * fsum;
        if (i % 2 == 1) gauss += kGK15GaussW[i / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    return {kron, std::fabs(kron - gauss)};
}

template <class F>
double adapt(F&& f, double a, double b, double tol, int depth) {
    auto [val, err] = gk15(f, a, b);
    if (err <= tol || err <= 1e-16 * std::fabs(val)) return val;
    if (depth <= 0)
        throw quadrature_error("adaptive quadrature: refinement depth limit exceeded");
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 15(7) to absolute tolerance abs_tol.
/// Throws quadrature_error when bisection exceeds the depth limit.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
    if (a == b) return 0.0;
    return detail::adapt(std::forward<F>(f), a, b, abs_tol, max_depth);
}

/// ∫_0^t f(s) ds with the substitution s = w²; absorbs integrable 1/√s
/// singularities of the integrand at s = 0.
template <class F>
double integrate_time(F&& f, double t, double abs_tol, int max_depth = 48) {
    if (t == 0.0) return 0.0;
    const double w_hi = std::sqrt(t);
    return integrate([&f](double w) { return 2.0 * w * f(w * w); }, 0.0, w_hi,
                     abs_tol, max_depth);
}

}  // namespace divctl
