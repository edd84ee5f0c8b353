#include <doctest.h>

#include <cmath>

#include "divctl/beta_curve.hpp"
#include "divctl/errors.hpp"
#include "divctl/passage.hpp"
#include "divctl/thresholds.hpp"
#include "oracles.hpp"

using divctl::model::ModelParams;
namespace thresholds = divctl::thresholds;
using thresholds::Regime;

namespace {
const ModelParams kRef{0.5, 1.0, 0.25, 0.2, 0.05};

oracle::EnvelopeOracle::Result envelope_solve(const ModelParams& p, double beta,
                                              double delta) {
    auto hitting = [&](double x) {
        return divctl::passage::hitting_prob(p, x, delta);
    };
    auto scale = [&](double x) { return divctl::passage::scale_h(p, x, delta); };
    oracle::EnvelopeOracle env(p, beta, delta, hitting, scale);
    return env.solve(hitting, scale);
}
}  // namespace

TEST_CASE("u2_of_beta: barrier branch below beta(delta)") {
    const double delta = 0.05;
    const double bd = divctl::beta::beta_of_t(kRef, delta);
    const auto b = divctl::model::solve_barrier(kRef);
    CHECK(thresholds::u2_of_beta(kRef, 0.5 * bd, delta) ==
          doctest::Approx(b.u0).epsilon(1e-14));
    CHECK(thresholds::u2_of_beta(kRef, bd, delta) ==
          doctest::Approx(b.u0).epsilon(1e-14));
    CHECK_THROWS_AS((void)thresholds::u1_of_beta(kRef, 0.5 * bd, delta),
                    std::invalid_argument);
}

TEST_CASE("u2_of_beta is continuous across beta(delta)") {
    const double delta = 0.05;
    const double bd = divctl::beta::beta_of_t(kRef, delta);
    const auto b = divctl::model::solve_barrier(kRef);
    double prev_u2 = 0.0;
    for (double f : {1.05, 1.02, 1.01}) {
        const double u2 = thresholds::u2_of_beta(kRef, f * bd, delta);
        CHECK(u2 < b.u0);
        CHECK(u2 > prev_u2);  // u2 rises back toward u0 as beta drops
        prev_u2 = u2;
    }
    CHECK(b.u0 - prev_u2 < 0.05 * b.u0);
    // and u1 -> 0 along the same path
    double prev_u1 = 1e300;
    for (double f : {1.05, 1.02, 1.01}) {
        const double u1 = thresholds::u1_of_beta(kRef, f * bd, delta);
        CHECK(u1 > 0.0);
        CHECK(u1 < prev_u1);
        prev_u1 = u1;
    }
    CHECK(prev_u1 < 0.1);
}

TEST_CASE("tangency residuals vanish at the solution") {
    const double delta = 0.1;
    const double beta = 2.0 * divctl::beta::beta_of_t(kRef, delta);
    const auto tp = thresholds::solve_tangency(kRef, beta, delta);
    CHECK(std::fabs(tp.residual_value) <= 1e-8);
    CHECK(std::fabs(tp.residual_slope) <= 1e-8);
    const auto rs =
        thresholds::tangency_residuals(kRef, beta, delta, tp.u1, tp.u2);
    CHECK(std::fabs(rs.residual_value) <= 1e-8);
    CHECK(std::fabs(rs.residual_slope) <= 1e-8);
}

TEST_CASE("tangency solution matches the envelope-search oracle") {
    const double delta = 0.1;
    const double beta = 2.0 * divctl::beta::beta_of_t(kRef, delta);
    const auto tp = thresholds::solve_tangency(kRef, beta, delta);
    const auto env = envelope_solve(kRef, beta, delta);
    const auto b = divctl::model::solve_barrier(kRef);
    CHECK(std::fabs(tp.u2 - env.u2) <= 1e-5 * b.u0);
    CHECK(std::fabs(tp.u1 - env.argmax) <= 2.0 * env.grid_dx);
}

TEST_CASE("fixed point: barrier-only classification") {
    ModelParams p = kRef;
    p.cap_cost = p.mu / p.rho;  // K >= mu/rho > mu/rho - u0
    const auto sol = thresholds::solve_fixed_point(p);
    CHECK(sol.regime == Regime::BarrierOnly);
    CHECK(sol.u1 == 0.0);
    CHECK(sol.u2 == doctest::Approx(divctl::model::solve_barrier(p).u0));
    CHECK(!std::isfinite(sol.delta0));

    // delay at or beyond the regime boundary: exactly (0, u0)
    ModelParams q = kRef;
    const double d0 = divctl::beta::solve_delta0(q);
    q.delay = d0 * 1.5;
    const auto sol2 = thresholds::solve_fixed_point(q);
    CHECK(sol2.regime == Regime::BarrierOnly);
    CHECK(sol2.u1 == 0.0);
    CHECK(sol2.u2 == divctl::model::solve_barrier(q).u0);
}

TEST_CASE("fixed point on the reference instance") {
    const auto sol = thresholds::solve_fixed_point(kRef);
    REQUIRE(sol.regime == Regime::TwoThreshold);
    const double mor = kRef.mu / kRef.rho;
    CHECK(sol.t2_residual <= 1e-10 * mor);
    CHECK(sol.beta_star > sol.beta_delta);
    CHECK(sol.u1 > 0.0);
    CHECK(sol.u1 < sol.u2);
    CHECK(sol.u2 < divctl::model::solve_barrier(kRef).u0);
    CHECK(std::fabs(sol.beta_star + sol.u2 - (mor - kRef.cap_cost)) <= 1e-8);
    // residuals of the tangency equations at the solution
    const auto rs = thresholds::tangency_residuals(kRef, sol.beta_star,
                                                   kRef.delay, sol.u1, sol.u2);
    CHECK(std::fabs(rs.residual_value) <= 1e-8);
    CHECK(std::fabs(rs.residual_slope) <= 1e-8);
}

TEST_CASE("g(beta) = beta + u2 strictly increasing, u2 nonincreasing") {
    const double delta = 0.05;
    const double bd = divctl::beta::beta_of_t(kRef, delta);
    double prev_g = -1e300, prev_u2 = 1e300;
    for (double f : {1.05, 1.2, 1.5, 2.0, 3.0, 4.5}) {
        const double u2 = thresholds::u2_of_beta(kRef, f * bd, delta);
        const double g = f * bd + u2;
        CHECK(g > prev_g);
        CHECK(u2 <= prev_u2 + 1e-12);
        prev_g = g;
        prev_u2 = u2;
    }
}

TEST_CASE("thresholds are continuous in delta") {
    double prev_u1 = 0.0, prev_u2 = 0.0;
    bool first = true;
    for (double d = 0.02; d <= 0.061; d += 0.005) {
        ModelParams p = kRef;
        p.delay = d;
        const auto sol = thresholds::solve_fixed_point(p);
        REQUIRE(sol.regime == Regime::TwoThreshold);
        if (!first) {
            CHECK(std::fabs(sol.u1 - prev_u1) < 0.15);
            CHECK(std::fabs(sol.u2 - prev_u2) < 0.15);
        }
        first = false;
        prev_u1 = sol.u1;
        prev_u2 = sol.u2;
    }
}

TEST_CASE("small-delay localization of u1 and the ratio trend") {
    const auto rows = thresholds::asymptotic_check(kRef, {1e-2, 1e-3, 1e-4});
    REQUIRE(rows.size() == 3);
    // the u1 ratio climbs monotonically toward 1 from below; the u2 ratio
    // peaks pre-asymptotically near delta = 3e-4 before decaying to 1, so it
    // only gets a proximity band here
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::fabs(rows[i].ratio_u1 - 1.0) <
              std::fabs(rows[i - 1].ratio_u1 - 1.0));
        CHECK(std::fabs(rows[i].ratio_u2 - 1.0) < 0.1);
    }
    // u1/sqrt(delta) localized in the (a(delta), b(delta)) window
    const double k0 = 1.5;
    for (const auto& r : rows) {
        if (r.delta > 1e-3) continue;
        const double z = r.u1 / std::sqrt(r.delta);
        const double a = kRef.sigma * std::sqrt(-std::log(r.delta) - 2.0 * k0);
        const double b = kRef.sigma * std::sqrt(-std::log(r.delta) + 2.0 * k0);
        CHECK(z > a);
        CHECK(z < b);
    }
    // deltas must be decreasing
    CHECK_THROWS_AS(
        (void)thresholds::asymptotic_check(kRef, {1e-3, 1e-2}),
        std::invalid_argument);
}

TEST_CASE("u_hat_cost solves its defining equation") {
    const auto b = divctl::model::solve_barrier(kRef);
    const double uhk = thresholds::u_hat_cost(kRef);
    const double rhs = uhk + kRef.mu / kRef.rho - kRef.cap_cost - b.u0;
    CHECK(divctl::model::v0_eval(b, uhk) == doctest::Approx(rhs).epsilon(1e-10));
    // K = 0 pushes u_hat to u0; the root is triple there (V0' - 1 and V0''
    // both vanish at u0) so only cube-root accuracy is available
    ModelParams q = kRef;
    q.cap_cost = 0.0;
    CHECK(thresholds::u_hat_cost(q) == doctest::Approx(b.u0).epsilon(1e-4));
}
