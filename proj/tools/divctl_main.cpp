// divctl: solver CLI for the delayed-recapitalization dividend control model.
// Subcommands: thresholds | value | verify | simulate | asymptotics | heatlab.
// JSON is the canonical output format; CSV is provided for plotting. Every
// output embeds the resolved config and the library version so a saved config
// reproduces its outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "divctl/beta_curve.hpp"
#include "divctl/errors.hpp"
#include "divctl/heatlab.hpp"
#include "divctl/json_io.hpp"
#include "divctl/model.hpp"
#include "divctl/passage.hpp"
#include "divctl/simulate.hpp"
#include "divctl/thresholds.hpp"
#include "divctl/value_fn.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;     // verification ran and found violations
constexpr int kExitConfig = 2;   // invalid config/params/usage
constexpr int kExitSolver = 3;   // solver or quadrature failure

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> paths;
    std::optional<int> grid;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    json j;
    in >> j;
    return j;
}

void emit(const CommonOpts& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(opt.out_path);
        if (!out) throw std::invalid_argument("cannot open output: " + opt.out_path);
        out << text;
    }
}

json base_output(const json& config) {
    return {{"version", divctl::kVersion}, {"config", config}};
}

std::string kv_csv(const json& j) {
    std::ostringstream os;
    os << "key,value\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_primitive())
            os << it.key() << "," << it.value().dump() << "\n";
    }
    return os.str();
}

int cmd_thresholds(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    const auto params = divctl::params_from_json(cfg);
    const auto sol = divctl::thresholds::solve_fixed_point(params);
    json out = base_output(cfg);
    out.merge_patch(divctl::to_json(sol));
    if (opt.format == "csv")
        emit(opt, kv_csv(out));
    else
        emit(opt, out.dump(2));
    return kExitOk;
}

int cmd_value(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    const auto params = divctl::params_from_json(cfg);
    const auto sol = divctl::thresholds::solve_fixed_point(params);
    const auto v = divctl::value::assemble_value(params, sol);
    const int n = opt.grid.value_or(cfg.value("grid", 201));
    if (n < 2) throw std::invalid_argument("value: grid must have >= 2 rows");
    const double x_max = cfg.value("x_max", 1.5 * sol.u2);

    json rows = json::array();
    std::ostringstream csv;
    csv << "x,V,dV,MV,AV\n";
    for (int i = 0; i < n; ++i) {
        const double x = x_max * i / (n - 1);
        const double V = v.eval(x, 0);
        const double dV = v.eval(x, 1);
        const double MV = divctl::value::m_operator(params, v, x);
        const double AV = divctl::value::generator_residual(params, v, x);
        rows.push_back({{"x", x}, {"V", V}, {"dV", dV}, {"MV", MV}, {"AV", AV}});
        csv << x << "," << V << "," << dV << "," << MV << "," << AV << "\n";
    }
    if (opt.format == "csv") {
        emit(opt, csv.str());
    } else {
        json out = base_output(cfg);
        out["thresholds"] = divctl::to_json(sol);
        out["rows"] = rows;
        emit(opt, out.dump(2));
    }
    return kExitOk;
}

int cmd_verify(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    const auto params = divctl::params_from_json(cfg);
    const auto sol = divctl::thresholds::solve_fixed_point(params);
    const auto v = divctl::value::assemble_value(params, sol);
    divctl::value::GridSpec grid;
    grid.n_uniform = opt.grid.value_or(cfg.value("grid", grid.n_uniform));
    const auto report = divctl::value::bellman_verify(params, v, grid);

    const double tol = 1e-6 * params.payout_bound();
    const bool pass = report.passes(tol, 1e-6);
    json out = base_output(cfg);
    out.merge_patch(divctl::to_json(report, params));
    out["thresholds"] = divctl::to_json(sol);
    out["tolerance"] = tol;
    out["pass"] = pass;
    if (opt.format == "csv")
        emit(opt, kv_csv(out));
    else
        emit(opt, out.dump(2));
    std::cout << (pass ? "PASS" : "FAIL")
              << " bellman verification (tolerance " << tol << ")\n";
    return pass ? kExitOk : kExitFail;
}

int cmd_simulate(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    const auto params = divctl::params_from_json(cfg);
    const std::string kind = cfg.value("policy", "two_threshold");
    const std::int64_t n_paths = opt.paths.value_or(cfg.value("paths", 10000));
    const std::uint64_t seed = opt.seed.value_or(cfg.value("seed", 12345));
    if (n_paths <= 0) throw std::invalid_argument("simulate: paths must be > 0");

    divctl::simulate::PolicySpec pol{};
    double x0;
    if (kind == "barrier") {
        const auto barrier = divctl::model::solve_barrier(params);
        const double eps = cfg.value("epsilon", barrier.u0 / 10.0);
        pol = divctl::simulate::barrier_policy(params, barrier, eps);
        x0 = cfg.value("x0", barrier.u0);
    } else if (kind == "two_threshold") {
        const auto sol = divctl::thresholds::solve_fixed_point(params);
        if (sol.regime != divctl::thresholds::Regime::TwoThreshold)
            throw divctl::solver_error(
                "simulate: instance is in the barrier-only regime; use "
                "policy=barrier");
        const double eps = cfg.value("epsilon", (sol.u2 - sol.u1) / 10.0);
        pol = divctl::simulate::two_threshold_policy(params, sol, eps);
        x0 = cfg.value("x0", sol.u2);
    } else {
        throw std::invalid_argument("simulate: unknown policy '" + kind + "'");
    }

    const int trace_paths = cfg.value("trace_paths", 0);
    if (trace_paths > 0) {
        const std::string trace_path =
            cfg.value("trace_out", std::string("divctl_trace.csv"));
        std::ofstream tr(trace_path);
        tr << "t,X,L,N\n";
        divctl::simulate::simulate_trace(
            params, pol, x0, seed,
            [&tr](double t, double X, double L, int N) {
                tr << t << "," << X << "," << L << "," << N << "\n";
            });
    }

    const auto est =
        divctl::simulate::simulate_policy(params, pol, x0, n_paths, seed);
    json out = base_output(cfg);
    out.merge_patch(divctl::to_json(est));
    out["policy"] = kind;
    out["epsilon"] = pol.epsilon;
    out["x0"] = x0;
    if (opt.format == "csv")
        emit(opt, kv_csv(out));
    else
        emit(opt, out.dump(2));
    return kExitOk;
}

int cmd_asymptotics(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    const auto params = divctl::params_from_json(cfg);
    std::vector<double> deltas = cfg.value(
        "deltas", std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5});
    const auto rows = divctl::thresholds::asymptotic_check(params, deltas);

    std::ostringstream csv;
    csv << "delta,u1,u2,ratio_u1,ratio_u2\n";
    json jrows = json::array();
    for (const auto& r : rows) {
        csv << r.delta << "," << r.u1 << "," << r.u2 << "," << r.ratio_u1 << ","
            << r.ratio_u2 << "\n";
        jrows.push_back({{"delta", r.delta},
                         {"u1", r.u1},
                         {"u2", r.u2},
                         {"ratio_u1", r.ratio_u1},
                         {"ratio_u2", r.ratio_u2}});
    }
    if (opt.format == "csv") {
        emit(opt, csv.str());
    } else {
        json out = base_output(cfg);
        out["rows"] = jrows;
        emit(opt, out.dump(2));
    }
    return kExitOk;
}

int cmd_heatlab(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    const auto params = divctl::params_from_json(cfg);
    const auto barrier = divctl::model::solve_barrier(params);
    const int n = opt.grid.value_or(cfg.value("grid", 512));

    // spatial-order study against the closed-form kernel
    const double t0 = cfg.value("t0", 0.25);
    const double t1 = cfg.value("t1", 0.5);
    const double x_max = 8.0 * barrier.u0;
    json orders = json::array();
    double err_prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        const int cells = n << level;
        auto pr = divctl::heatlab::make_profile(
            x_max, cells, t0,
            [&](double x) {
                return x == 0.0 ? 1.0
                                : divctl::passage::hitting_prob(params, x, t0);
            });
        const double dt = pr.dx;
        pr = divctl::heatlab::evolve(
            params, std::move(pr), [](double) { return 1.0; }, t1, dt);
        double err = 0.0;
        for (std::size_t i = 0; i < pr.u.size(); ++i) {
            const double x = pr.x(i);
            const double exact =
                x == 0.0 ? 1.0 : divctl::passage::hitting_prob(params, x, t1);
            err = std::max(err, std::fabs(pr.u[i] - exact));
        }
        json row{{"cells", cells}, {"max_error", err}};
        if (level > 0) row["order"] = std::log2(err_prev / err);
        orders.push_back(row);
        err_prev = err;
    }

    // sign-change demo on the barrier gap at the instance's own beta(Delta)
    const double beta =
        2.0 * divctl::beta::beta_of_t(params, params.delay);
    auto gap0 = divctl::heatlab::make_profile(
        x_max, n, 0.0,
        [&](double x) {
            return beta + x - divctl::model::v0_eval(barrier, x);
        });
    gap0.right = divctl::heatlab::fit_robin_closure(gap0);
    const double gap_dt = gap0.dx;
    const auto reports = divctl::heatlab::check_single_crossing(
        params, std::move(gap0), [](double) { return 0.0; },
        {0.5 * params.delay, params.delay, 2.0 * params.delay}, gap_dt);
    json jcross = json::array();
    for (const auto& r : reports)
        jcross.push_back({{"t", r.time}, {"n_sign_changes", r.n_sign_changes}});

    json out = base_output(cfg);
    out["convergence"] = orders;
    out["crossings"] = jcross;
    if (opt.format == "csv") {
        std::ostringstream csv;
        csv << "t,n_sign_changes\n";
        for (const auto& r : reports)
            csv << r.time << "," << r.n_sign_changes << "\n";
        emit(opt, csv.str());
    } else {
        emit(opt, out.dump(2));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"divctl: dividend/recapitalization threshold solver"};
    app.require_subcommand(1);

    CommonOpts opt;
    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config path")
            ->required();
        sub->add_option("--out", opt.out_path, "output path (default stdout)");
        sub->add_option("--format", opt.format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", opt.seed, "RNG seed");
        sub->add_option("--paths", opt.paths, "Monte-Carlo path count");
        sub->add_option("--grid", opt.grid, "grid size");
    };

    auto* sub_thresholds = app.add_subcommand("thresholds", "solve the fixed point");
    auto* sub_value = app.add_subcommand("value", "tabulate V, V', MV, (A-rho)V");
    auto* sub_verify = app.add_subcommand("verify", "check the Bellman system");
    auto* sub_simulate = app.add_subcommand("simulate", "Monte-Carlo policy return");
    auto* sub_asym = app.add_subcommand("asymptotics", "small-delay ratio table");
    auto* sub_heatlab = app.add_subcommand("heatlab", "finite-difference demos");
    for (auto* sub : {sub_thresholds, sub_value, sub_verify, sub_simulate,
                      sub_asym, sub_heatlab})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sub_thresholds->parsed()) return cmd_thresholds(opt);
        if (sub_value->parsed()) return cmd_value(opt);
        if (sub_verify->parsed()) return cmd_verify(opt);
        if (sub_simulate->parsed()) return cmd_simulate(opt);
        if (sub_asym->parsed()) return cmd_asymptotics(opt);
        if (sub_heatlab->parsed()) return cmd_heatlab(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const divctl::quadrature_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const divctl::solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitConfig;
}
