#include "divctl/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace divctl::model {

void ModelParams::validate() const {
    auto bad = [](const std::string& what) {
        throw std::invalid_argument("ModelParams: " + what);
    };
    if (!std::isfinite(mu) || mu <= 0.0) bad("mu must be finite and > 0");
    if (!std::isfinite(sigma) || sigma <= 0.0) bad("sigma must be finite and > 0");
    if (!std::isfinite(rho) || rho <= 0.0) bad("rho must be finite and > 0");
    if (!std::isfinite(cap_cost) || cap_cost < 0.0) bad("K must be finite and >= 0");
    if (!std::isfinite(delay) || delay <= 0.0) bad("Delta must be finite and > 0");
}

Roots characteristic_roots(const ModelParams& p) {
    // pure formula; tolerates the symmetric mu = 0 limit used in tests
    const double disc = std::sqrt(p.mu * p.mu + 2.0 * p.sigma * p.sigma * p.rho);
    // r1 written as 2 rho / (mu + disc) to avoid cancellation for small rho.
    return {2.0 * p.rho / (p.mu + disc), (p.mu + disc) / (p.sigma * p.sigma)};
}

BarrierSolution solve_barrier(const ModelParams& p) {
    const auto [r1, r2] = characteristic_roots(p);
    const double mor = p.mu / p.rho;
    const double c1 = (mor * r2 + 1.0) / (r1 + r2);
    const double c2 = (mor * r1 - 1.0) / (r1 + r2);  // always < 0
    // rho - mu r1 = 2 sigma^2 rho^2 / (mu + disc)^2, a cancellation-free form.
    const double disc = std::sqrt(p.mu * p.mu + 2.0 * p.sigma * p.sigma * p.rho);
    const double denom = 2.0 * p.sigma * p.sigma * p.rho * p.rho /
                         ((p.mu + disc) * (p.mu + disc));
    const double u0 = std::log((p.rho + p.mu * r2) / denom) / (r1 + r2);
    return {r1, r2, u0, c1, c2, mor};
}

double v0_eval(const BarrierSolution& b, double x, int order) {
    const double s = x - b.u0;
    const double e1 = std::exp(b.r1 * s);
    const double e2 = std::exp(-b.r2 * s);
    switch (order) {
        case 0: return b.c1 * e1 + b.c2 * e2;
        case 1: return b.r1 * b.c1 * e1 - b.r2 * b.c2 * e2;
        case 2: return b.r1 * b.r1 * b.c1 * e1 + b.r2 * b.r2 * b.c2 * e2;
        default: throw std::invalid_argument("v0_eval: order must be 0, 1 or 2");
    }
}

double v0_inverse(const BarrierSolution& b, double target) {
    if (!(target >= 0.0))
        throw std::invalid_argument("v0_inverse: target must be >= 0");
    const double tol = 1e-12 * std::max(1.0, std::fabs(target));
    double lo = 0.0;
    double hi = b.u0 > 0.0 ? b.u0 : 1.0;
    while (v0_eval(b, hi) < target) {
        hi = 2.0 * hi + 1.0;
        if (hi > 1e12) throw std::invalid_argument("v0_inverse: target unreachable");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = v0_eval(b, mid) - target;
        if (std::fabs(f) <= tol) return mid;
        (f < 0.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-16 * std::max(1.0, std::fabs(mid))) return mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace divctl::model
