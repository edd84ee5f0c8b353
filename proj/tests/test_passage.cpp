#include <doctest.h>

#include <cmath>
#include <random>

#include "divctl/gauss.hpp"
#include "divctl/passage.hpp"
#include "divctl/quadrature.hpp"
#include "oracles.hpp"

using divctl::model::ModelParams;
namespace passage = divctl::passage;

namespace {
const ModelParams kRef{0.5, 1.0, 0.25, 0.2, 0.05};
}

TEST_CASE("quadrature self-check") {
    // polynomial exactness and a transcendental reference
    const double q1 = divctl::integrate(
        [](double x) { return x * x * x * x * x * x * x; }, 0.0, 1.0, 1e-14);
    CHECK(q1 == doctest::Approx(0.125).epsilon(1e-14));
    const double q2 =
        divctl::integrate([](double x) { return std::exp(x); }, 0.0, 2.0, 1e-13);
    CHECK(q2 == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-13));
    const double q3 = divctl::integrate_time(
        [](double s) { return 1.0 / std::sqrt(s); }, 4.0, 1e-12);
    CHECK(q3 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("hitting probability boundary and tail limits") {
    CHECK(passage::hitting_prob(kRef, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(passage::hitting_prob(kRef, 0.0, 1e-6) == doctest::Approx(1.0).epsilon(1e-12));
    const double t = 0.7;
    const double far = 5.0 * kRef.sigma * std::sqrt(t) + kRef.mu * t;
    CHECK(passage::hitting_prob(kRef, far, t) < 1e-4);
    CHECK(passage::hitting_prob(kRef, 1e-3, 1e-9) < 1e-12);  // p(x,0+) = 0
    CHECK_THROWS_AS((void)passage::hitting_prob(kRef, -1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)passage::hitting_prob(kRef, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("closed form vs quadrature of the Green's function") {
    for (double x : {0.1, 0.5, 1.0, 2.0}) {
        for (double t : {0.05, 0.4, 1.0, 3.0}) {
            const double closed = passage::hitting_prob(kRef, x, t);
            const double quad = oracle::hitting_prob_quadrature(kRef, x, t);
            CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
        }
    }
}

TEST_CASE("closed form vs bridge-corrected Monte Carlo") {
    const auto mc = oracle::absorbed_mc(kRef, 1.0, 1.0, 200000, 42);
    const double closed = passage::hitting_prob(kRef, 1.0, 1.0);
    CHECK(std::fabs(closed - mc.hit.mean) <= 3.0 * mc.hit.se);
}

TEST_CASE("dp/dx against finite differences and sign") {
    const double x = 0.5, t = 0.7, h = 1e-5;
    const double fd = (passage::hitting_prob(kRef, x + h, t) -
                       passage::hitting_prob(kRef, x - h, t)) /
                      (2.0 * h);
    const double an = passage::hitting_prob_dx(kRef, x, t);
    CHECK(an == doctest::Approx(fd).epsilon(1e-6));
    for (double xx : {0.0, 0.3, 1.0, 4.0})
        CHECK(passage::hitting_prob_dx(kRef, xx, t) <= 0.0);
    CHECK(passage::hitting_prob_dx(kRef, 0.0, t) < 0.0);  // Hopf-strict
}

TEST_CASE("small-time slope limit at the boundary") {
    for (double t : {1e-2, 1e-4, 1e-6}) {
        const double v = std::sqrt(2.0 * M_PI * kRef.sigma * kRef.sigma * t) *
                         passage::hitting_prob_dx(kRef, 0.0, t);
        CHECK(v < 0.0);
        if (t == 1e-6) CHECK(v == doctest::Approx(-2.0).epsilon(1e-2));
    }
}

TEST_CASE("d2p/dx2: positivity, finite differences, deep-tail envelope") {
    const double x = 1.0, t = 0.5, h = 1e-4;
    const double fd = (passage::hitting_prob(kRef, x + h, t) -
                       2.0 * passage::hitting_prob(kRef, x, t) +
                       passage::hitting_prob(kRef, x - h, t)) /
                      (h * h);
    const double an = passage::hitting_prob_dxx(kRef, x, t);
    CHECK(an == doctest::Approx(fd).epsilon(1e-5));
    for (double xx : {0.0, 0.2, 1.0, 3.0})
        CHECK(passage::hitting_prob_dxx(kRef, xx, t) >= 0.0);

    // two-sided envelope for x >= 2 mu t
    const double s2 = kRef.sigma * kRef.sigma;
    for (double xx : {2.0 * kRef.mu * t, 1.0, 2.0, 4.0}) {
        const double lhs = std::sqrt(2.0 * M_PI * s2 * t) *
                           passage::hitting_prob_dxx(kRef, xx, t);
        const double e = std::exp(-(xx + kRef.mu * t) * (xx + kRef.mu * t) /
                                  (2.0 * s2 * t));
        const double lo = 2.0 * (xx / (s2 * t) + 2.0 * kRef.mu / s2) * e;
        const double hi = 2.0 * (xx / (s2 * t) + 4.0 * kRef.mu / s2) * e;
        CHECK(lhs >= lo * (1.0 - 1e-12));
        CHECK(lhs <= hi * (1.0 + 1e-12));
    }
}

TEST_CASE("dp/dt is the first-passage density, nonnegative") {
    const double x = 0.8, t = 0.6, h = 1e-6;
    const double fd = (passage::hitting_prob(kRef, x, t + h) -
                       passage::hitting_prob(kRef, x, t - h)) /
                      (2.0 * h);
    CHECK(passage::hitting_prob_dt(kRef, x, t) == doctest::Approx(fd).epsilon(1e-6));
    for (double xx : {0.0, 0.4, 2.0})
        CHECK(passage::hitting_prob_dt(kRef, xx, t) >= 0.0);
}

TEST_CASE("scale function h: boundary, initial data and MC oracle") {
    CHECK(passage::scale_h(kRef, 0.0, 1.0) == 0.0);
    CHECK(passage::scale_h(kRef, 1.0, 1e-8) == doctest::Approx(1.0).epsilon(1e-7));
    const auto mc = oracle::absorbed_mc(kRef, 1.0, 1.0, 200000, 99);
    const double h = passage::scale_h(kRef, 1.0, 1.0);
    CHECK(std::fabs(h - mc.stopped_mean.mean) <= 3.0 * mc.stopped_mean.se);
}

TEST_CASE("dh/dx quadrature vs finite differences of h") {
    for (double x : {0.0, 0.3, 1.2}) {
        const double t = 0.8, d = 1e-5;
        const double fd = x == 0.0
                              ? (-1.5 * passage::scale_h(kRef, 0.0, t) +
                                 2.0 * passage::scale_h(kRef, d, t) -
                                 0.5 * passage::scale_h(kRef, 2.0 * d, t)) /
                                    d
                              : (passage::scale_h(kRef, x + d, t) -
                                 passage::scale_h(kRef, x - d, t)) /
                                    (2.0 * d);
        CHECK(passage::scale_h_dx(kRef, x, t) ==
              doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("dh/dx envelope on a grid") {
    // 1 <= dh/dx <= 1 + 4 mu sqrt(t)/sqrt(2 pi sigma^2) + 2 mu^2 t/sigma^2.
    // The last term bounds the drift part of -dp/dx, whose time integral
    // exceeds the Gaussian-only envelope's slack.
    const double s2 = kRef.sigma * kRef.sigma;
    for (int i = 1; i <= 50; ++i) {
        const double x = 3.0 * i / 50.0;
        for (int j = 1; j <= 50; ++j) {
            const double t = 2.0 * j / 50.0;
            const double v = passage::scale_h_dx(kRef, x, t);
            CHECK(v >= 1.0 - 1e-9);
            CHECK(v <= 1.0 +
                           4.0 * kRef.mu * std::sqrt(t) /
                               std::sqrt(2.0 * M_PI * s2) +
                           2.0 * kRef.mu * kRef.mu * t / s2 + 1e-9);
        }
    }
}

TEST_CASE("maximum-principle inequalities for h") {
    const auto b = divctl::model::solve_barrier(kRef);
    for (double t : {0.1, 0.5, 2.0}) {
        const double ert = std::exp(kRef.rho * t);
        for (int i = 0; i <= 20; ++i) {
            const double x = b.u0 + 3.0 * i / 20.0;
            // mu/rho - u0 + h(x,t) <= e^{rho t}(x - u0 + mu/rho)
            CHECK(kRef.mu / kRef.rho - b.u0 + passage::scale_h(kRef, x, t) <=
                  ert * (x - b.u0 + kRef.mu / kRef.rho) + 1e-10);
        }
        for (int i = 0; i <= 20; ++i) {
            const double x = 4.0 * i / 20.0;
            // h(x,t) <= e^{rho t} V0(x)
            CHECK(passage::scale_h(kRef, x, t) <=
                  ert * divctl::model::v0_eval(b, x) + 1e-10);
        }
    }
}

TEST_CASE("dp/dt >= 0 via forward differences in t") {
    for (double x : {0.2, 0.8, 1.6}) {
        for (double t : {0.05, 0.3, 1.0}) {
            CHECK(passage::hitting_prob(kRef, x, t + 1e-4) >=
                  passage::hitting_prob(kRef, x, t) - 1e-12);
        }
    }
}

TEST_CASE("small-delay kernel scaling band") {
    // 0 < p(sqrt(D) z, D) <= C sqrt(D)/|ln D|^{1/2} on the tangency window;
    // C fitted at the coarsest delay with a 1.5 safety factor
    const double k0 = 0.5;
    auto worst_ratio = [&](double d) {
        const double s2 = kRef.sigma * kRef.sigma;
        const double a = std::sqrt(s2 * (-std::log(d) - 2.0 * k0));
        const double b = std::sqrt(s2 * (-std::log(d) + 2.0 * k0));
        double worst = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double z = a + (b - a) * i / 20.0;
            const double p = passage::hitting_prob(kRef, std::sqrt(d) * z, d);
            CHECK(p > 0.0);
            worst = std::max(worst,
                             p / (std::sqrt(d) / std::sqrt(-std::log(d))));
        }
        return worst;
    };
    const double fitted_c = 1.5 * worst_ratio(1e-2);
    for (double d : {1e-3, 1e-4, 1e-5})
        CHECK(worst_ratio(d) <= fitted_c);
}
