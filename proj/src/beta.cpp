#include "divctl/beta_curve.hpp"

#include <cmath>
#include <stdexcept>

#include "divctl/errors.hpp"
#include "divctl/passage.hpp"

namespace divctl::beta {

double beta_of_t(const ModelParams& p, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("beta_of_t: require t > 0");
    const auto b = model::solve_barrier(p);
    const double num = passage::scale_h_dx(p, 0.0, t) -
                       std::exp(p.rho * t) * model::v0_eval(b, 0.0, 1);
    const double den = passage::hitting_prob_dx(p, 0.0, t);
    return num / den;
}

double smalltime_coefficient(const ModelParams& p) {
    const auto b = model::solve_barrier(p);
    return (model::v0_eval(b, 0.0, 1) - 1.0) * p.sigma * std::sqrt(M_PI / 2.0);
}

double beta_smalltime_ratio(const ModelParams& p, double t) {
    return beta_of_t(p, t) / (std::sqrt(t) * smalltime_coefficient(p));
}

double solve_delta0(const ModelParams& p) {
    p.validate();
    const auto b = model::solve_barrier(p);
    const double target = p.mu / p.rho - p.cap_cost - b.u0;
    if (!(target > 0.0))
        throw solver_error("solve_delta0: K >= mu/rho - u0, no regime boundary");
    double lo = 1.0, hi = 1.0;
    while (beta_of_t(p, hi) < target) {
        hi *= 2.0;
        if (hi > 1e12) throw solver_error("solve_delta0: upper bracket not found");
    }
    while (beta_of_t(p, lo) > target) {
        lo *= 0.5;
        if (lo < 1e-15) throw solver_error("solve_delta0: lower bracket not found");
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (beta_of_t(p, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BetaCurve sample_curve(const ModelParams& p, double t_lo, double t_hi, int n) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || n < 2)
        throw std::invalid_argument("sample_curve: bad grid spec");
    BetaCurve curve{p, {}};
    curve.samples.reserve(static_cast<std::size_t>(n));
    const double lg_lo = std::log(t_lo), lg_hi = std::log(t_hi);
    for (int i = 0; i < n; ++i) {
        const double t = std::exp(lg_lo + (lg_hi - lg_lo) * i / (n - 1));
        curve.samples.emplace_back(t, beta_of_t(p, t));
    }
    return curve;
}

}  // namespace divctl::beta
