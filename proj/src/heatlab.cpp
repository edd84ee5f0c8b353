#include "divctl/heatlab.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "divctl/errors.hpp"

namespace divctl::heatlab {

Profile make_profile(double x_max, int n_cells, double t0, const InitialData& f,
                     RightClosure right) {
    if (!(x_max > 0.0) || n_cells < 8)
        throw std::invalid_argument("make_profile: bad grid spec");
    Profile pr;
    pr.dx = x_max / n_cells;
    pr.t = t0;
    pr.right = right;
    pr.u.resize(static_cast<std::size_t>(n_cells) + 1);
    for (std::size_t i = 0; i < pr.u.size(); ++i) pr.u[i] = f(pr.x(i));
    return pr;
}

RightClosure fit_robin_closure(const Profile& pr) {
    const std::size_t n = pr.u.size() - 1;
    const double ux = (pr.u[n] - pr.u[n - 2]) / (2.0 * pr.dx);
    const double uv = pr.u[n - 1];
    if (std::fabs(uv) < 1e-12 * (1.0 + std::fabs(ux))) return {0.0, ux};
    return {ux / uv, 0.0};
}

namespace {

// Thomas solve for a tridiagonal system; diag/rhs are overwritten.
void tridiag_solve(std::vector<double>& lower, std::vector<double>& diag,
                   std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

Profile evolve(const ModelParams& p, Profile pr, const LeftBoundary& left,
               double t_end, double dt) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    if (t_end < pr.t) throw std::invalid_argument("evolve: t_end before profile time");
    const std::size_t n = pr.u.size();
    if (n < 4) throw std::invalid_argument("evolve: profile too small");

    const double nu = 0.5 * p.sigma * p.sigma;
    const double dx = pr.dx;
    const double a = nu / (dx * dx) - 0.5 * p.mu / dx;  // coefficient of u_{i-1}
    const double b = -2.0 * nu / (dx * dx);
    const double c = nu / (dx * dx) + 0.5 * p.mu / dx;  // coefficient of u_{i+1}

    double norm0 = 0.0;
    for (double v : pr.u) norm0 = std::max(norm0, std::fabs(v));
    const double blowup = 1e6 * (norm0 + 1.0);

    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    const std::size_t last = n - 1;

    while (pr.t < t_end - 1e-15 * std::max(1.0, t_end)) {
        const double step = std::min(dt, t_end - pr.t);
        const double t_new = pr.t + step;
        const double half = 0.5 * step;

        // explicit half: rhs = (I + step/2 A) u
        rhs[0] = left(t_new);
        for (std::size_t i = 1; i < last; ++i)
            rhs[i] = pr.u[i] +
                     half * (a * pr.u[i - 1] + b * pr.u[i] + c * pr.u[i + 1]);
        {
            // ghost node: u_{N+1} = u_{N-1} + 2 dx (r u_N + s)
            const double r = pr.right.robin_coef, s = pr.right.slope;
            const double au = (a + c) * pr.u[last - 1] +
                              (b + 2.0 * dx * c * r) * pr.u[last] +
                              2.0 * dx * c * s;
            rhs[last] = pr.u[last] + half * au;
        }

        // implicit half: (I - step/2 A) u_new = rhs
        diag[0] = 1.0;
        upper[0] = 0.0;
        for (std::size_t i = 1; i < last; ++i) {
            lower[i] = -half * a;
            diag[i] = 1.0 - half * b;
            upper[i] = -half * c;
        }
        {
            const double r = pr.right.robin_coef, s = pr.right.slope;
            lower[last] = -half * (a + c);
            diag[last] = 1.0 - half * (b + 2.0 * dx * c * r);
            rhs[last] += half * 2.0 * dx * c * s;
        }
        tridiag_solve(lower, diag, upper, rhs);
        pr.u = rhs;
        pr.t = t_new;

        double norm = 0.0;
        for (double v : pr.u) norm = std::max(norm, std::fabs(v));
        if (!std::isfinite(norm) || norm > blowup)
            throw solver_error("evolve: instability detected (norm blow-up)");
    }
    return pr;
}

CrossingReport count_crossings(const Profile& pr) {
    CrossingReport rep{pr.t, 0, {}, {}};
    double scale = 0.0;
    for (double v : pr.u) scale = std::max(scale, std::fabs(v));
    const double tol = 1e-12 * scale;

    int prev_sign = 0;
    std::size_t prev_idx = 0;
    for (std::size_t i = 0; i < pr.u.size(); ++i) {
        const double v = pr.u[i];
        if (std::fabs(v) <= tol) continue;  // merged into adjacent intervals
        const int sign = v > 0.0 ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign) {
            ++rep.n_sign_changes;
            const double x0 = pr.x(prev_idx), x1 = pr.x(i);
            const double f0 = pr.u[prev_idx], f1 = pr.u[i];
            const double xc = x0 + (x1 - x0) * f0 / (f0 - f1);
            rep.locations.push_back(xc);
            // centered slope at the node nearest the crossing
            std::size_t k = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::lround(xc / pr.dx)), 1,
                pr.u.size() - 2);
            rep.slopes.push_back((pr.u[k + 1] - pr.u[k - 1]) / (2.0 * pr.dx));
        }
        prev_sign = sign;
        prev_idx = i;
    }
    return rep;
}

namespace {

template <class Report, class Analyze>
std::vector<Report> evolve_and_sample(const ModelParams& p, Profile pr,
                                      const LeftBoundary& left,
                                      const std::vector<double>& t_samples,
                                      double dt, Analyze&& analyze) {
    std::vector<Report> out;
    out.reserve(t_samples.size());
    for (double ts : t_samples) {
        if (ts < pr.t)
            throw std::invalid_argument("sample times must be ascending");
        pr = evolve(p, std::move(pr), left, ts, dt);
        out.push_back(analyze(pr));
    }
    return out;
}

}  // namespace

std::vector<CrossingReport> check_single_crossing(
    const ModelParams& p, Profile initial, const LeftBoundary& left,
    const std::vector<double>& t_samples, double dt) {
    return evolve_and_sample<CrossingReport>(
        p, std::move(initial), left, t_samples, dt,
        [](const Profile& pr) { return count_crossings(pr); });
}

std::vector<PositivityReport> check_interval_positivity(
    const ModelParams& p, Profile initial, const LeftBoundary& left,
    const std::vector<double>& t_samples, double dt) {
    auto analyze = [](const Profile& pr) {
        PositivityReport rep{pr.t, PositiveSetKind::Empty, 0.0, 0.0, false};
        double scale = 0.0;
        for (double v : pr.u) scale = std::max(scale, std::fabs(v));
        const double tol = 1e-12 * scale;

        // runs of indices with u >= -tol
        std::vector<std::pair<std::size_t, std::size_t>> runs;
        bool in_run = false;
        for (std::size_t i = 0; i < pr.u.size(); ++i) {
            if (pr.u[i] >= -tol) {
                if (!in_run) {
                    runs.emplace_back(i, i);
                    in_run = true;
                } else {
                    runs.back().second = i;
                }
            } else {
                in_run = false;
            }
        }
        // drop runs that never rise above the zero band
        std::erase_if(runs, [&](const auto& r) {
            for (std::size_t i = r.first; i <= r.second; ++i)
                if (pr.u[i] > tol) return false;
            return true;
        });
        if (runs.empty()) return rep;
        if (runs.size() > 1) {
            rep.kind = PositiveSetKind::Disconnected;
            rep.lo = pr.x(runs.front().first);
            rep.hi = pr.x(runs.back().second);
            return rep;
        }
        const auto [i0, i1] = runs.front();
        rep.lo = pr.x(i0);
        rep.hi = pr.x(i1);
        const double width = rep.hi - rep.lo;
        rep.kind = width <= 2.0 * pr.dx ? PositiveSetKind::PointOrDegenerate
                                        : PositiveSetKind::Interval;
        rep.interior_strictly_positive = true;
        for (std::size_t i = i0 + 1; i < i1; ++i)
            if (!(pr.u[i] > tol)) rep.interior_strictly_positive = false;
        return rep;
    };
    return evolve_and_sample<PositivityReport>(p, std::move(initial), left,
                                               t_samples, dt, analyze);
}

std::vector<NondegeneracyReport> check_nondegenerate_crossing(
    const ModelParams& p, Profile initial, const LeftBoundary& left,
    const std::vector<double>& t_samples, double dt) {
    // orientation from the initial data: +1 when it crosses - to +
    const CrossingReport init = count_crossings(initial);
    const double orient =
        (!init.slopes.empty() && init.slopes.front() < 0.0) ? -1.0 : 1.0;
    auto analyze = [orient](const Profile& pr) {
        const CrossingReport cr = count_crossings(pr);
        NondegeneracyReport rep{pr.t, false, 0.0, 0.0};
        if (!cr.locations.empty()) {
            rep.has_crossing = true;
            rep.location = cr.locations.front();
            rep.oriented_slope = orient * cr.slopes.front();
        }
        return rep;
    };
    return evolve_and_sample<NondegeneracyReport>(p, std::move(initial), left,
                                                  t_samples, dt, analyze);
}

Profile derivative_profile(const Profile& pr) {
    Profile d;
    d.dx = pr.dx;
    d.t = pr.t;
    const std::size_t n = pr.u.size();
    d.u.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
        d.u[i] = (pr.u[i + 1] - pr.u[i - 1]) / (2.0 * pr.dx);
    d.u[0] = (pr.u[1] - pr.u[0]) / pr.dx;
    d.u[n - 1] = (pr.u[n - 1] - pr.u[n - 2]) / pr.dx;
    return d;
}

void write_csv(const Profile& pr, std::ostream& os) {
    os << "x,u\n";
    for (std::size_t i = 0; i < pr.u.size(); ++i)
        os << pr.x(i) << "," << pr.u[i] << "\n";
}

}  // namespace divctl::heatlab
