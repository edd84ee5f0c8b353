#include "divctl/value_fn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "divctl/errors.hpp"
#include "divctl/parallel.hpp"
#include "divctl/passage.hpp"

namespace divctl::value {

PiecewiseValue::PiecewiseValue(const ModelParams& p, const ThresholdSolution& s,
                               bool validate)
    : params_(p),
      barrier_(model::solve_barrier(p)),
      regime_(s.regime),
      u1_(s.u1),
      u2_(s.u2),
      vcoef_(s.regime == Regime::TwoThreshold ? s.beta_star : 0.0),
      mcoef_(p.mu / p.rho - s.u2 - p.cap_cost) {
    p.validate();
    if (!(u2_ > 0.0) || u1_ < 0.0 || u1_ >= u2_ + 1e-15)
        throw std::invalid_argument("PiecewiseValue: inconsistent thresholds");
    if (validate && regime_ == Regime::TwoThreshold) {
        const double scale0 = std::max(1.0, p.mu / p.rho);
        const double c0 = intervention_branch(u1_, 0) - continuation_branch(u1_, 0);
        const double c1 = intervention_branch(u1_, 1) - continuation_branch(u1_, 1);
        if (std::fabs(c0) > 1e-8 * scale0 || std::fabs(c1) > 1e-8)
            throw solver_error(
                "assemble_value: C1 matching at u1 failed; thresholds are "
                "inconsistent with the tangency system");
    }
}

double PiecewiseValue::intervention_branch(double x, int order) const {
    const ModelParams& p = params_;
    const double disc = std::exp(-p.rho * p.delay);
    switch (order) {
        case 0:
            if (x == 0.0) return 0.0;
            return disc * (vcoef_ * (1.0 - passage::hitting_prob(p, x, p.delay)) +
                           passage::scale_h(p, x, p.delay));
        case 1:
            return disc * (-vcoef_ * passage::hitting_prob_dx(p, x, p.delay) +
                           passage::scale_h_dx(p, x, p.delay));
        case 2:
            return disc * (-vcoef_ * passage::hitting_prob_dxx(p, x, p.delay) +
                           passage::scale_h_dxx(p, x, p.delay));
        default:
            throw std::invalid_argument("eval: order must be 0, 1 or 2");
    }
}

double PiecewiseValue::continuation_branch(double x, int order) const {
    return model::v0_eval(barrier_, x + barrier_.u0 - u2_, order);
}

double PiecewiseValue::eval(double x, int order) const {
    if (!(x >= 0.0)) throw std::invalid_argument("eval: require x >= 0");
    if (x > u2_) {
        switch (order) {
            case 0: return x - u2_ + barrier_.mu_over_rho;
            case 1: return 1.0;
            case 2: return 0.0;
            default: throw std::invalid_argument("eval: order must be 0, 1 or 2");
        }
    }
    if (regime_ == Regime::TwoThreshold && x <= u1_)
        return intervention_branch(x, order);
    return continuation_branch(x, order);
}

PiecewiseValue assemble_value(const ModelParams& p, const ThresholdSolution& s,
                              bool validate) {
    return PiecewiseValue(p, s, validate);
}

double m_operator(const ModelParams& p, const PiecewiseValue& v, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("m_operator: require x >= 0");
    const double disc = std::exp(-p.rho * p.delay);
    if (x == 0.0) return 0.0;
    return disc * (v.m_coefficient() * (1.0 - passage::hitting_prob(p, x, p.delay)) +
                   passage::scale_h(p, x, p.delay));
}

double generator_residual(const ModelParams& p, const PiecewiseValue& v,
                          double x, int side) {
    if (!(x >= 0.0)) throw std::invalid_argument("generator_residual: x >= 0");
    const bool intervention =
        v.regime() == Regime::TwoThreshold &&
        (side < 0 || (side == 0 && x <= v.u1() && v.u1() > 0.0));
    if (intervention) {
        // A(1-p) = -dp/dt and Ah = dh/dt = mu (1 - p), so the branch residual
        // needs no numerical differentiation.
        const double disc = std::exp(-p.rho * p.delay);
        const double pv = x == 0.0 ? 1.0 : passage::hitting_prob(p, x, p.delay);
        const double hv = x == 0.0 ? 0.0 : passage::scale_h(p, x, p.delay);
        const double pt = passage::hitting_prob_dt(p, x, p.delay);
        const double beta = v.m_coefficient();
        return disc * (-beta * pt + p.mu * (1.0 - pv) -
                       p.rho * (beta * (1.0 - pv) + hv));
    }
    if (x > v.u2()) return -p.rho * (x - v.u2());
    const double w = x + v.barrier().u0 - v.u2();
    return 0.5 * p.sigma * p.sigma * model::v0_eval(v.barrier(), w, 2) +
           p.mu * model::v0_eval(v.barrier(), w, 1) -
           p.rho * model::v0_eval(v.barrier(), w, 0);
}

namespace {

std::vector<double> build_grid(const PiecewiseValue& v, const GridSpec& g) {
    const double x_max = g.x_max_mult * v.u2();
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(g.n_uniform + 4 * g.n_refine + 8));
    for (int i = 0; i <= g.n_uniform; ++i)
        xs.push_back(x_max * i / g.n_uniform);
    const double band = g.refine_band * v.u2();
    auto cluster = [&](double at) {
        if (at <= 0.0) return;
        double off = band;
        for (int k = 0; k < g.n_refine / 2; ++k) {
            if (at - off >= 0.0) xs.push_back(at - off);
            if (at + off <= x_max) xs.push_back(at + off);
            off *= 0.52;
        }
        xs.push_back(at);
    };
    cluster(v.u1());
    cluster(v.u2());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace

bool BellmanReport::passes(double tol_abs, double tol_product) const {
    return residual_a <= tol_abs && residual_b <= tol_abs &&
           residual_c <= tol_abs && residual_d <= tol_abs &&
           complementarity <= tol_product;
}

BellmanReport bellman_verify(const ModelParams& p, const PiecewiseValue& v,
                             const GridSpec& g) {
    BellmanReport rep{};
    rep.grid = build_grid(v, g);
    const std::size_t n = rep.grid.size();

    struct Row {
        double gap_m;   // MV - V
        double av;      // (A - rho)V, worse side at the joint
        double slope;   // V'
    };
    std::vector<Row> rows(n);
    parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t i) {
        const double x = rep.grid[static_cast<std::size_t>(i)];
        Row r{};
        const double vx = v.eval(x, 0);
        r.gap_m = m_operator(p, v, x) - vx;
        r.slope = v.eval(x, 1);
        if (v.regime() == Regime::TwoThreshold && x == v.u1() && v.u1() > 0.0) {
            r.av = std::max(generator_residual(p, v, x, -1),
                            generator_residual(p, v, x, +1));
            r.slope = std::min(v.intervention_branch(x, 1),
                               v.continuation_branch(x, 1));
        } else {
            r.av = generator_residual(p, v, x, 0);
        }
        rows[static_cast<std::size_t>(i)] = r;
    });

    rep.residual_a = std::fabs(v.eval(0.0, 0));
    double max_b = -std::numeric_limits<double>::infinity();
    double max_c = max_b, max_d = max_b;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (const Row& r : rows) {
        max_b = std::max(max_b, r.gap_m);
        max_c = std::max(max_c, r.av);
        max_d = std::max(max_d, 1.0 - r.slope);
        s1 = std::max(s1, std::fabs(r.gap_m));
        s2 = std::max(s2, std::fabs(r.av));
        s3 = std::max(s3, std::fabs(r.slope - 1.0));
    }
    rep.residual_b = max_b;
    rep.residual_c = max_c;
    rep.residual_d = max_d;
    double max_e = 0.0;
    if (s1 > 0.0 && s2 > 0.0 && s3 > 0.0) {
        for (const Row& r : rows) {
            const double e = std::fabs(r.gap_m / s1) * std::fabs(r.av / s2) *
                             std::fabs((r.slope - 1.0) / s3);
            max_e = std::max(max_e, e);
        }
    }
    rep.residual_e = max_e;
    rep.complementarity = max_e;
    return rep;
}

std::pair<double, double> c2_jump_at_u1(const ModelParams& p,
                                        const PiecewiseValue& v) {
    if (v.regime() != Regime::TwoThreshold)
        throw std::invalid_argument("c2_jump_at_u1: two-threshold regime only");
    (void)p;
    return {v.intervention_branch(v.u1(), 2), v.continuation_branch(v.u1(), 2)};
}

}  // namespace divctl::value
