#include <doctest.h>

#include <cmath>

#include "divctl/beta_curve.hpp"
#include "divctl/errors.hpp"
#include "divctl/passage.hpp"
#include "oracles.hpp"

using divctl::model::ModelParams;
namespace beta = divctl::beta;

namespace {
const ModelParams kRef{0.5, 1.0, 0.25, 0.2, 0.05};
const ModelParams kFree{0.5, 1.0, 0.25, 0.0, 0.05};  // K = 0

// Independent route: numerator and denominator assembled from one-sided
// finite differences of quadrature-era h and p values.
double beta_fd_oracle(const ModelParams& p, double t) {
    const double d = 1e-5;
    auto h = [&](double x) { return divctl::passage::scale_h(p, x, t); };
    const double hx0 =
        (-1.5 * h(0.0) + 2.0 * h(d) - 0.5 * h(2.0 * d)) / d;
    auto pp = [&](double x) {
        return x == 0.0 ? 1.0 : oracle::hitting_prob_quadrature(p, x, t);
    };
    const double px0 =
        (-1.5 * pp(0.0) + 2.0 * pp(d) - 0.5 * pp(2.0 * d)) / d;
    const auto b = divctl::model::solve_barrier(p);
    const double num =
        hx0 - std::exp(p.rho * t) * divctl::model::v0_eval(b, 0.0, 1);
    return num / px0;
}
}  // namespace

TEST_CASE("beta(t) against the finite-difference oracle") {
    const double t = 1.0;
    const double direct = beta::beta_of_t(kRef, t);
    const double fd = beta_fd_oracle(kRef, t);
    CHECK(direct == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("beta strictly increasing and positive on log-spaced samples") {
    const auto curve = beta::sample_curve(kRef, 1e-6, 1e2, 40);
    REQUIRE(curve.samples.size() == 40);
    double prev = 0.0;
    for (const auto& [t, bt] : curve.samples) {
        CHECK(bt > 0.0);
        CHECK(bt > prev);
        prev = bt;
    }
}

TEST_CASE("small-time ratio tends to 1") {
    CHECK(beta::beta_smalltime_ratio(kRef, 1e-6) ==
          doctest::Approx(1.0).epsilon(0.05));
    // ratios approach 1 monotonically along the shrinking sequence
    const double r2 = beta::beta_smalltime_ratio(kRef, 1e-2);
    const double r4 = beta::beta_smalltime_ratio(kRef, 1e-4);
    const double r6 = beta::beta_smalltime_ratio(kRef, 1e-6);
    CHECK(std::fabs(r4 - 1.0) < std::fabs(r2 - 1.0));
    CHECK(std::fabs(r6 - 1.0) < std::fabs(r4 - 1.0));
    // a large t is far from the small-time regime
    CHECK(std::fabs(beta::beta_smalltime_ratio(kRef, 10.0) - 1.0) > 0.25);
}

TEST_CASE("delta0 solves beta(delta0) = mu/rho - K - u0") {
    const auto b = divctl::model::solve_barrier(kFree);
    const double d0 = beta::solve_delta0(kFree);
    const double target = kFree.mu / kFree.rho - b.u0;
    CHECK(std::fabs(beta::beta_of_t(kFree, d0) - target) <=
          1e-8 * (kFree.mu / kFree.rho));

    // K rising to the boundary pushes delta0 to 0
    ModelParams q = kFree;
    const double margin = q.mu / q.rho - b.u0;
    q.cap_cost = 0.95 * margin;
    const double d0_tight = beta::solve_delta0(q);
    CHECK(d0_tight < d0);
    q.cap_cost = 0.999 * margin;
    CHECK(beta::solve_delta0(q) < d0_tight);

    q.cap_cost = margin * 1.01;
    CHECK_THROWS_AS((void)beta::solve_delta0(q), divctl::solver_error);
}
