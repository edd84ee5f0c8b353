#include "divctl/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "divctl/parallel.hpp"
#include "divctl/passage.hpp"
#include "divctl/rng.hpp"
#include "divctl/value_fn.hpp"

namespace divctl::simulate {

void PolicySpec::validate(const ModelParams& p) const {
    p.validate();
    if (kind == PolicyKind::BarrierEps) {
        if (!(u2 > 0.0) || !(epsilon > 0.0) || !(epsilon < u2))
            throw std::invalid_argument("policy: require 0 < eps < u0");
    } else {
        if (!(u1 > 0.0) || !(u2 > u1))
            throw std::invalid_argument("policy: require 0 < u1 < u2");
        if (!(epsilon > 0.0) || !(epsilon < u2 - u1))
            throw std::invalid_argument("policy: require 0 < eps < u2 - u1");
        if (std::fabs(delay - p.delay) > 1e-12 * std::max(1.0, p.delay) ||
            std::fabs(cap_cost - p.cap_cost) > 1e-12 * std::max(1.0, p.cap_cost))
            throw std::invalid_argument("policy: delay/cost mismatch with params");
    }
}

PolicySpec barrier_policy(const ModelParams& p,
                          const model::BarrierSolution& b, double epsilon) {
    PolicySpec pol{PolicyKind::BarrierEps, epsilon, 0.0, b.u0, p.delay,
                   p.cap_cost};
    pol.validate(p);
    return pol;
}

PolicySpec two_threshold_policy(const ModelParams& p,
                                const thresholds::ThresholdSolution& s,
                                double epsilon) {
    if (s.regime != thresholds::Regime::TwoThreshold)
        throw std::invalid_argument("two_threshold_policy: wrong regime");
    PolicySpec pol{PolicyKind::TwoThresholdEps, epsilon, s.u1, s.u2, p.delay,
                   p.cap_cost};
    pol.validate(p);
    return pol;
}

namespace {

struct PathOutcome {
    double payout = 0.0;
    bool ruined = false;
    bool truncated = false;
    double trunc_bound = 0.0;
};

struct Engine {
    const ModelParams& p;
    const PolicySpec& pol;
    const SimConfig& cfg;
    double t_max;
    double dt_floor;
    double dt_cap;

    Engine(const ModelParams& p_, const PolicySpec& pol_, const SimConfig& cfg_)
        : p(p_), pol(pol_), cfg(cfg_) {
        t_max = cfg.t_max_over_rho / p.rho;
        const double width =
            pol.kind == PolicyKind::BarrierEps ? pol.u2 : pol.u2 - pol.u1;
        const double scale = width * width / (p.sigma * p.sigma);
        dt_floor = cfg.dt_floor_rel * scale;
        dt_cap = cfg.dt_cap_rel * scale;
    }

    double step_dt(double dist) const {
        const double dt = dist * dist /
                          (cfg.step_safety * cfg.step_safety * p.sigma * p.sigma);
        return std::clamp(dt, dt_floor, dt_cap);
    }

    // One Bernoulli bridge draw for crossing `level` between endpoints a, b on
    // the same side.  Exact for constant-coefficient diffusions.
    bool bridge_hit(CounterRng& rng, double a, double b, double level,
                    double dt) const {
        const double da = a - level, db = b - level;
        const double expo = -2.0 * da * db / (p.sigma * p.sigma * dt);
        if (expo < -40.0) return false;
        return rng.next_uniform() < std::exp(expo);
    }

    PathOutcome run(CounterRng& rng, double x0,
                    const PathObserver* obs = nullptr) const {
        PathOutcome out;
        double t = 0.0, X = x0, L = 0.0;
        int n_raises = 0;
        auto observe = [&] {
            if (obs) (*obs)(t, X, L, n_raises);
        };
        auto pay = [&](double lump) {
            out.payout += std::exp(-p.rho * t) * lump;
            L += lump;
        };
        observe();
        if (X <= 0.0) {
            out.ruined = true;
            return out;
        }

        const bool two = pol.kind == PolicyKind::TwoThresholdEps;
        const double lower = two ? pol.u1 : 0.0;

        for (;;) {
            if (t >= t_max) {
                out.truncated = true;
                out.trunc_bound =
                    std::exp(-p.rho * t) * (X + p.mu / p.rho);
                return out;
            }
            if (X >= pol.u2) {
                pay(X - pol.u2 + pol.epsilon);
                X = pol.u2 - pol.epsilon;
                observe();
                continue;
            }
            if (two && X <= pol.u1) {
                // capital ordered: wait the delay at fine fixed steps,
                // absorbing at 0 throughout
                const double ds = pol.delay / cfg.delay_substeps;
                double Y = X;
                bool dead = false;
                for (int j = 1; j <= cfg.delay_substeps; ++j) {
                    const double Yn = Y + p.mu * ds +
                                      p.sigma * std::sqrt(ds) * rng.next_normal();
                    if (Yn <= 0.0 || bridge_hit(rng, Y, Yn, 0.0, ds)) {
                        t += j * ds;
                        dead = true;
                        break;
                    }
                    Y = Yn;
                }
                if (dead) {
                    X = 0.0;
                    out.ruined = true;
                    observe();
                    return out;
                }
                t += pol.delay;
                ++n_raises;
                pay(Y - pol.u2 - pol.cap_cost);
                X = pol.u2;
                observe();
                continue;
            }

            const double dist = std::min(X - lower, pol.u2 - X);
            double dt = step_dt(dist);
            dt = std::min(dt, t_max - t + 1e-12);
            const double Xn =
                X + p.mu * dt + p.sigma * std::sqrt(dt) * rng.next_normal();

            if (Xn <= lower || bridge_hit(rng, X, Xn, lower, dt)) {
                t += dt;
                if (two) {
                    X = pol.u1;  // order point reached
                    observe();
                } else {
                    X = 0.0;
                    out.ruined = true;
                    observe();
                    return out;
                }
                continue;
            }
            if (Xn >= pol.u2) {
                t += dt;
                pay(Xn - pol.u2 + pol.epsilon);
                X = pol.u2 - pol.epsilon;
                observe();
                continue;
            }
            if (bridge_hit(rng, X, Xn, pol.u2, dt)) {
                t += dt;
                pay(pol.epsilon);
                X = pol.u2 - pol.epsilon;
                observe();
                continue;
            }
            X = Xn;
            t += dt;
            if (obs) observe();
        }
    }
};

}  // namespace

SimulationEstimate simulate_policy(const ModelParams& p, const PolicySpec& pol,
                                   double x0, std::int64_t n_paths,
                                   std::uint64_t seed, const SimConfig& cfg) {
    pol.validate(p);
    if (n_paths <= 0)
        throw std::invalid_argument("simulate_policy: require n_paths > 0");
    if (!(x0 >= 0.0))
        throw std::invalid_argument("simulate_policy: require x0 >= 0");

    const Engine engine(p, pol, cfg);
    std::vector<PathOutcome> outcomes(static_cast<std::size_t>(n_paths));
    parallel_for(n_paths, [&](std::int64_t i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        outcomes[static_cast<std::size_t>(i)] = engine.run(rng, x0);
    });

    // sequential reduction in path order: estimates are bit-identical
    // regardless of thread count
    double sum = 0.0;
    for (const auto& o : outcomes) sum += o.payout;
    const double mean = sum / static_cast<double>(n_paths);
    double ss = 0.0;
    std::int64_t ruined = 0, truncated = 0;
    double bound_sum = 0.0;
    for (const auto& o : outcomes) {
        const double d = o.payout - mean;
        ss += d * d;
        ruined += o.ruined ? 1 : 0;
        truncated += o.truncated ? 1 : 0;
        bound_sum += o.trunc_bound;
    }
    const double var = n_paths > 1 ? ss / static_cast<double>(n_paths - 1) : 0.0;
    return {mean,
            std::sqrt(var / static_cast<double>(n_paths)),
            n_paths,
            seed,
            static_cast<double>(ruined) / static_cast<double>(n_paths),
            truncated,
            bound_sum / static_cast<double>(n_paths)};
}

void simulate_trace(const ModelParams& p, const PolicySpec& pol, double x0,
                    std::uint64_t seed, const PathObserver& observer,
                    const SimConfig& cfg) {
    pol.validate(p);
    const Engine engine(p, pol, cfg);
    CounterRng rng(seed, 0);
    engine.run(rng, x0, &observer);
}

double veps_closed_form_barrier(const ModelParams& p,
                                const model::BarrierSolution& b, double epsilon,
                                double x0) {
    if (!(epsilon > 0.0) || !(epsilon < b.u0))
        throw std::invalid_argument("veps barrier: require 0 < eps < u0");
    if (!(x0 >= 0.0)) throw std::invalid_argument("veps barrier: x0 >= 0");
    (void)p;
    const double slope =
        (model::v0_eval(b, b.u0) - model::v0_eval(b, b.u0 - epsilon)) / epsilon;
    if (x0 <= b.u0) return model::v0_eval(b, x0) / slope;
    return x0 - b.u0 + epsilon + model::v0_eval(b, b.u0 - epsilon) / slope;
}

std::pair<double, double> exit_functionals(const ModelParams& p, double u1,
                                           double u2, double x) {
    if (!(u1 < u2) || !(x >= u1) || !(x <= u2))
        throw std::invalid_argument("exit_functionals: require u1 <= x <= u2");
    const auto r = model::characteristic_roots(p);
    const double L = u2 - u1;
    // (A - rho)-harmonic interpolants with the stated boundary values
    const double d = x - u1;
    const double w2 = (std::exp(r.r1 * d) - std::exp(-r.r2 * d)) /
                      (std::exp(r.r1 * L) - std::exp(-r.r2 * L));
    const double e = x - u2;
    const double w1 = (std::exp(-r.r2 * e) - std::exp(r.r1 * e)) /
                      (std::exp(r.r2 * L) - std::exp(-r.r1 * L));
    return {w1, w2};
}

namespace {

struct TwoThresholdClosedForm {
    double g2;        // g_eps(u2)
    double g1;        // g_eps(u1)
    double v_at_u2m;  // V_eps(u2 - eps)
};

TwoThresholdClosedForm closed_form_core(const ModelParams& p,
                                        const thresholds::ThresholdSolution& s,
                                        double eps,
                                        const value::PiecewiseValue& v) {
    const double pu1 = passage::hitting_prob(p, s.u1, p.delay);
    const double disc = std::exp(-p.rho * p.delay);
    const auto [w1m, w2m] = exit_functionals(p, s.u1, s.u2, s.u2 - eps);
    const double num = -(v.eval(s.u2) - v.eval(s.u2 - eps) - eps);
    const double den = 1.0 - w2m - disc * (1.0 - pu1) * w1m;
    const double g2 = num / den;
    const double g1 = disc * g2 * (1.0 - pu1);
    return {g2, g1, v.eval(s.u2 - eps) + g2 * w2m + g1 * w1m};
}

}  // namespace

double g_eps_u2(const ModelParams& p, const thresholds::ThresholdSolution& s,
                double eps) {
    if (s.regime != thresholds::Regime::TwoThreshold)
        throw std::invalid_argument("g_eps_u2: two-threshold regime only");
    if (!(eps > 0.0) || !(eps < s.u2 - s.u1))
        throw std::invalid_argument("g_eps_u2: require 0 < eps < u2 - u1");
    const value::PiecewiseValue v(p, s);
    return closed_form_core(p, s, eps, v).g2;
}

double veps_closed_form_twothreshold(const ModelParams& p,
                                     const thresholds::ThresholdSolution& s,
                                     double eps, double x0) {
    if (s.regime != thresholds::Regime::TwoThreshold)
        throw std::invalid_argument("veps two-threshold: wrong regime");
    if (!(eps > 0.0) || !(eps < s.u2 - s.u1))
        throw std::invalid_argument("veps: require 0 < eps < u2 - u1");
    if (!(x0 >= 0.0)) throw std::invalid_argument("veps: x0 >= 0");
    const value::PiecewiseValue v(p, s);
    const auto cf = closed_form_core(p, s, eps, v);
    if (x0 >= s.u2) return x0 - s.u2 + eps + cf.v_at_u2m;
    if (x0 > s.u1) {
        const auto [w1, w2] = exit_functionals(p, s.u1, s.u2, x0);
        return v.eval(x0) + cf.g2 * w2 + cf.g1 * w1;
    }
    if (x0 == 0.0) return 0.0;
    const double disc = std::exp(-p.rho * p.delay);
    return v.eval(x0) +
           disc * cf.g2 * (1.0 - passage::hitting_prob(p, x0, p.delay));
}

}  // namespace divctl::simulate
