#include "divctl/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "divctl/beta_curve.hpp"
#include "divctl/errors.hpp"
#include "divctl/passage.hpp"

namespace divctl::thresholds {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Gap g(x; u2) = beta(1 - p(x,D)) + h(x,D) - e^{rho D} V0(x - u2 + u0) and its
// x-derivatives.  The tangency point is the double root g = g_x = 0.
struct Gap {
    const ModelParams& p;
    const model::BarrierSolution& b;
    double beta;
    double delta;
    double erd;  // e^{rho delta}

    double lhs(double x) const {
        if (x == 0.0) return 0.0;  // p(0,D) = 1, h(0,D) = 0
        return beta * (1.0 - passage::hitting_prob(p, x, delta)) +
               passage::scale_h(p, x, delta);
    }
    double lhs_dx(double x) const {
        return -beta * passage::hitting_prob_dx(p, x, delta) +
               passage::scale_h_dx(p, x, delta);
    }
    double lhs_dxx(double x) const {
        return -beta * passage::hitting_prob_dxx(p, x, delta) +
               passage::scale_h_dxx(p, x, delta);
    }
    double value(double x, double u2) const {
        return lhs(x) - erd * model::v0_eval(b, x - u2 + b.u0, 0);
    }
    double dx(double x, double u2) const {
        return lhs_dx(x) - erd * model::v0_eval(b, x - u2 + b.u0, 1);
    }
    double dxx(double x, double u2) const {
        return lhs_dxx(x) - erd * model::v0_eval(b, x - u2 + b.u0, 2);
    }
};

struct NewtonOutcome {
    bool ok = false;
    double u1 = 0, u2 = 0;
    int iterations = 0;
};

double merit(const Gap& g, double u1, double u2, double s1, double s2) {
    const double f1 = g.value(u1, u2) / s1;
    const double f2 = g.dx(u1, u2) / s2;
    return f1 * f1 + f2 * f2;
}

NewtonOutcome newton_tangency(const Gap& g, double u1, double u2) {
    NewtonOutcome out;
    const double s1 = std::max(1.0, g.p.mu / g.p.rho);
    const double s2 = std::max(1.0, g.erd * model::v0_eval(g.b, 0.0, 1));
    double m = merit(g, u1, u2, s1, s2);
    for (int iter = 0; iter < 80; ++iter) {
        const double f1 = g.value(u1, u2);
        const double f2 = g.dx(u1, u2);
        if (std::fabs(f1) <= 1e-12 * s1 && std::fabs(f2) <= 1e-12 * s2) {
            out.ok = true;
            out.u1 = u1;
            out.u2 = u2;
            out.iterations = iter;
            return out;
        }
        const double w = u1 - u2 + g.b.u0;
        const double j11 = f2;  // dF1/du1 equals the slope residual
        const double j12 = g.erd * model::v0_eval(g.b, w, 1);
        const double j21 = g.dxx(u1, u2);
        const double j22 = g.erd * model::v0_eval(g.b, w, 2);
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || std::fabs(det) < 1e-300) return out;
        const double d1 = (-f1 * j22 + f2 * j12) / det;
        const double d2 = (-j11 * f2 + j21 * f1) / det;
        double lambda = 1.0;
        bool stepped = false;
        for (int k = 0; k < 40; ++k) {
            const double t1 = u1 + lambda * d1;
            const double t2 = u2 + lambda * d2;
            if (t1 > 0.0) {
                const double mt = merit(g, t1, t2, s1, s2);
                if (std::isfinite(mt) && mt < m) {
                    u1 = t1;
                    u2 = t2;
                    m = mt;
                    stepped = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!stepped) return out;
    }
    return out;
}

// Scan-plus-golden maximization of x -> gap(x; u2).  The scan grid mixes
// linear coverage with log-spaced points near 0 so that tiny touching points
// (beta close to beta(delta)) are not stepped over.
std::pair<double, double> gap_max(const Gap& g, double u2) {
    const double x_hi =
        std::max(3.0 * g.b.u0, std::max(u2, 0.0) + g.b.u0) +
        8.0 * g.p.sigma * std::sqrt(g.delta);
    std::vector<double> xs;
    xs.reserve(520);
    const int n_lin = 384;
    for (int i = 0; i <= n_lin; ++i) xs.push_back(x_hi * i / n_lin);
    const double x_tiny = 1e-9 * g.b.u0;
    const int n_log = 128;
    for (int i = 0; i < n_log; ++i)
        xs.push_back(x_tiny * std::pow(x_hi / x_tiny, double(i) / n_log));
    std::sort(xs.begin(), xs.end());

    double best_x = 0.0, best_v = g.value(0.0, u2);
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = g.value(xs[i], u2);
        if (v > best_v) {
            best_v = v;
            best_x = xs[i];
            best_i = i;
        }
    }
    double lo = best_i > 0 ? xs[best_i - 1] : 0.0;
    double hi = best_i + 1 < xs.size() ? xs[best_i + 1] : x_hi;
    // golden-section refinement on the bracketing interval
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = g.value(c, u2), fd = g.value(d, u2);
    for (int i = 0; i < 120 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = g.value(c, u2);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = g.value(d, u2);
        }
    }
    const double xm = 0.5 * (lo + hi);
    const double vm = g.value(xm, u2);
    if (vm >= best_v) return {xm, vm};
    return {best_x, best_v};
}

// Envelope formulation: M(u2) = max_x gap(x; u2) is strictly increasing in
// u2; bisect for its zero, then polish with Newton.
NewtonOutcome nested_bisection(const Gap& g, double u2_seed) {
    const double scale = std::max(1.0, g.b.u0);
    double hi = g.b.u0;
    auto [xh, mh] = gap_max(g, hi);
    if (!(mh > 0.0)) {
        // beta barely above beta(delta): the solution sits at u2 ~ u0
        hi = g.b.u0 + 1e-9 * scale;
        std::tie(xh, mh) = gap_max(g, hi);
        if (!(mh > 0.0)) throw solver_error("tangency: no upper bracket in u2");
    }
    double lo = std::min(u2_seed, hi - 1e-6 * scale);
    double step = std::max(0.05 * scale, g.p.sigma * std::sqrt(g.delta));
    auto [xl, ml] = gap_max(g, lo);
    while (ml > 0.0) {
        lo -= step;
        step *= 2.0;
        if (lo < -20.0 * scale) throw solver_error("tangency: no lower bracket in u2");
        std::tie(xl, ml) = gap_max(g, lo);
    }
    double x_at = xh;
    while (hi - lo > 1e-13 * scale) {
        const double mid = 0.5 * (lo + hi);
        auto [xm, mm] = gap_max(g, mid);
        if (mm > 0.0) {
            hi = mid;
            x_at = xm;
        } else {
            lo = mid;
            x_at = xm;
        }
    }
    NewtonOutcome out = newton_tangency(g, std::max(x_at, 1e-14 * scale),
                                        0.5 * (lo + hi));
    if (!out.ok) {
        // accept the bisection point if its residuals are already tight
        const double u1 = x_at, u2 = 0.5 * (lo + hi);
        const double f1 = g.value(u1, u2), f2 = g.dx(u1, u2);
        if (std::fabs(f1) <= 1e-9 * std::max(1.0, g.p.mu / g.p.rho) &&
            std::fabs(f2) <= 1e-9) {
            out.ok = true;
            out.u1 = u1;
            out.u2 = u2;
        }
    }
    return out;
}

// A converged Newton point must be the envelope touching point: positive u1,
// strictly negative gap curvature, and gap <= 0 on a coarse scan.
bool valid_tangency(const Gap& g, double u1, double u2) {
    if (!(u1 > 0.0) || !std::isfinite(u2)) return false;
    if (!(g.dxx(u1, u2) < 0.0)) return false;
    const double tol = 1e-7 * std::max(1.0, g.p.mu / g.p.rho);
    const double x_hi = std::max(3.0 * g.b.u0, u2 + g.b.u0);
    for (int i = 0; i <= 64; ++i) {
        const double x = x_hi * i / 64.0;
        if (g.value(x, u2) > tol) return false;
    }
    return true;
}

Gap make_gap(const ModelParams& p, const model::BarrierSolution& b, double beta,
             double delta) {
    return Gap{p, b, beta, delta, std::exp(p.rho * delta)};
}

TangencyPoint solve_tangency_impl(const ModelParams& p,
                                  const model::BarrierSolution& b, double beta,
                                  double delta) {
    const Gap g = make_gap(p, b, beta, delta);
    const double u_hat_beta = model::v0_inverse(b, beta);
    const double log_d = std::fabs(std::log(delta));
    const double u1_seed =
        p.sigma * std::sqrt(delta) * std::sqrt(std::max(1.0, log_d));
    const double u2_seed = b.u0 - u_hat_beta;

    NewtonOutcome out = newton_tangency(g, u1_seed, u2_seed);
    bool fallback = false;
    if (!out.ok || !valid_tangency(g, out.u1, out.u2)) {
        out = nested_bisection(g, u2_seed);
        fallback = true;
        if (!out.ok)
            throw solver_error(
                "tangency solver diverged (beta may be near-degenerate, close "
                "to beta(delta))");
    }
    return {out.u1, out.u2, g.value(out.u1, out.u2), g.dx(out.u1, out.u2),
            out.iterations, fallback};
}

}  // namespace

TangencyPoint solve_tangency(const ModelParams& p, double beta, double delta) {
    p.validate();
    if (!(delta > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("solve_tangency: require beta > 0, delta > 0");
    const auto b = model::solve_barrier(p);
    return solve_tangency_impl(p, b, beta, delta);
}

double u2_of_beta(const ModelParams& p, double beta, double delta) {
    p.validate();
    if (!(beta >= 0.0) || !(delta > 0.0))
        throw std::invalid_argument("u2_of_beta: require beta >= 0, delta > 0");
    const double bd = beta::beta_of_t(p, delta);
    if (beta <= bd) return model::solve_barrier(p).u0;
    return solve_tangency(p, beta, delta).u2;
}

double u1_of_beta(const ModelParams& p, double beta, double delta) {
    p.validate();
    const double bd = beta::beta_of_t(p, delta);
    if (!(beta > bd))
        throw std::invalid_argument("u1_of_beta: require beta > beta(delta)");
    return solve_tangency(p, beta, delta).u1;
}

TangencySystem tangency_residuals(const ModelParams& p, double beta,
                                  double delta, double u1, double u2) {
    const auto b = model::solve_barrier(p);
    const Gap g = make_gap(p, b, beta, delta);
    return {beta, delta, g.value(u1, u2), g.dx(u1, u2)};
}

ThresholdSolution solve_fixed_point(const ModelParams& p) {
    p.validate();
    const auto b = model::solve_barrier(p);
    const double mor = p.mu / p.rho;
    const double bd = beta::beta_of_t(p, p.delay);

    ThresholdSolution out{};
    out.beta_delta = bd;
    out.delta0 = (p.cap_cost < mor - b.u0) ? beta::solve_delta0(p) : kNaN;

    if (p.cap_cost >= mor - b.u0 - bd) {
        out.regime = Regime::BarrierOnly;
        out.beta_star = kNaN;
        out.u1 = 0.0;
        out.u2 = b.u0;
        out.t2_residual = 0.0;
        return out;
    }

    // Bisection on the strictly increasing residual beta + u2(beta,D) - (mor-K).
    const double target = mor - p.cap_cost;
    double lo = bd, hi = target;
    TangencyPoint tp{};
    double beta_star = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        tp = solve_tangency_impl(p, b, mid, p.delay);
        const double r = mid + tp.u2 - target;
        beta_star = mid;
        if (std::fabs(r) <= 1e-12 * mor || hi - lo <= 1e-14 * std::max(1.0, mor))
            break;
        (r < 0.0 ? lo : hi) = mid;
    }
    out.regime = Regime::TwoThreshold;
    out.beta_star = beta_star;
    out.u1 = tp.u1;
    out.u2 = tp.u2;
    out.t2_residual = std::fabs(beta_star + tp.u2 - target);
    return out;
}

double u_hat_cost(const ModelParams& p) {
    p.validate();
    const auto b = model::solve_barrier(p);
    const double rhs0 = p.mu / p.rho - p.cap_cost - b.u0;
    if (!(rhs0 > 0.0))
        throw std::invalid_argument("u_hat_cost: requires K < mu/rho - u0");
    double lo = 0.0, hi = b.u0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = model::v0_eval(b, mid) - mid - rhs0;
        (f < 0.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, b.u0)) break;
    }
    return 0.5 * (lo + hi);
}

std::vector<AsymptoticRow> asymptotic_check(const ModelParams& p,
                                            const std::vector<double>& deltas) {
    p.validate();
    const auto b = model::solve_barrier(p);
    if (!(p.cap_cost < p.mu / p.rho - b.u0))
        throw std::invalid_argument("asymptotic_check: requires K < mu/rho - u0");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] < deltas[i - 1])))
            throw std::invalid_argument(
                "asymptotic_check: deltas must be positive and decreasing");
    }
    const double uhk = u_hat_cost(p);
    const double u2_limit = b.u0 - uhk;

    std::vector<AsymptoticRow> rows;
    rows.reserve(deltas.size());
    for (const double d : deltas) {
        ModelParams q = p;
        q.delay = d;
        const auto sol = solve_fixed_point(q);
        const double denom =
            p.sigma * std::sqrt(d) * std::sqrt(std::fabs(std::log(d)));
        rows.push_back({d, sol.u1, sol.u2, sol.u1 / denom,
                        (sol.u2 - u2_limit) / denom});
    }
    return rows;
}

}  // namespace divctl::thresholds
