// gnls: command line driver for scenario runs, ground states, sweeps and identity checks.

#include "gnls/gnls.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

using namespace gnls;

namespace {

struct PolynomialArgs {
    std::string preset;
    std::string file;
    int n = 2;
    double a = 1.0;
    double b = 0.0;
    bool b_given = false;
};

void add_polynomial_options(CLI::App* cmd, PolynomialArgs& p) {
    cmd->add_option("--preset", p.preset, "Preset nonlinearity: manakov or spinor");
    cmd->add_option("--poly-file", p.file, "Polynomial JSON file (preset reference or inline table)");
    cmd->add_option("--n", p.n, "Component count for the manakov preset");
    cmd->add_option("--a", p.a, "Spinor parameter a");
    cmd->add_option("--b", p.b, "Spinor parameter b");
}

GaugePolynomial resolve_polynomial(const PolynomialArgs& p) {
    if (p.preset.empty() == p.file.empty()) throw UsageError("give exactly one of --preset and --poly-file");
    if (!p.file.empty()) return load_polynomial_file(p.file);
    if (p.preset == "manakov") return polynomial_from_json({{"preset", "manakov"}, {"n", p.n}});
    if (p.preset == "spinor") return polynomial_from_json({{"preset", "spinor"}, {"a", p.a}, {"b", p.b}});
    throw UsageError("unknown preset '" + p.preset + "'");
}

void print_summary(const RunOutcome& o) {
    const auto& s = o.summary;
    std::cout << "status " << s["status"].get<std::string>() << " at t=" << s["t_final"].get<double>() << '\n';
    std::cout << "verdict " << (s["verdict"].is_null() ? std::string("n/a") : s["verdict"].get<std::string>()) << '\n';
    std::cout << "drifts " << s["drifts"].dump() << '\n';
}

int cmd_groundstate(double omega, const PolynomialArgs& pa, const std::string& w_arg, int n, double L,
                    double truncation_tol, const std::string& out_path) {
    const GaugePolynomial g = resolve_polynomial(pa);
    const RadialProfile& q = scalar_ground_state();
    const SphereMaximum sphere = maximize_g_on_sphere(g);
    const Thresholds thr = thresholds(q, sphere.g_max);

    GroundStateSpec spec;
    spec.omega = omega;
    spec.g_max = sphere.g_max;
    if (w_arg == "optimize") {
        spec.w = sphere.maximizers.front();
    } else {
        json wj;
        try {
            wj = json::parse(w_arg);
        } catch (const json::parse_error&) {
            throw UsageError("--w must be 'optimize' or a JSON array");
        }
        spec.w = detail::complex_vector(wj, "/w");
        double n2 = 0.0;
        for (auto v : spec.w) n2 += std::norm(v);
        for (auto& v : spec.w) v /= std::sqrt(n2);
    }
    spec.validate(g);

    GridDescriptor grid{n, L, g.n_components()};
    grid.validate();
    const FieldState u = build_ground_state(spec, q, grid, truncation_tol);
    const FunctionalRecord rec = functionals(u, g, omega);

    json maximizers = json::array();
    for (const auto& m : sphere.maximizers) maximizers.push_back(detail::complex_to_json(m));
    json report{
        {"q0", q.q0},
        {"int_q2", q.int_q2},
        {"int_grad2", q.int_grad2},
        {"int_q4", q.int_q4},
        {"pohozaev", {{"grad2_over_q2", q.int_grad2 / q.int_q2}, {"q4_over_q2", q.int_q4 / q.int_q2}}},
        {"g_max", sphere.g_max},
        {"maximizers", maximizers},
        {"w", detail::complex_to_json(spec.w)},
        {"omega", omega},
        {"thresholds", detail::thresholds_json(thr)},
        {"grid", {{"n", n}, {"L", L}}},
        {"functionals", detail::record_json(rec)},
        {"S_omega", rec.S_omega},
        {"K_over_H", rec.K / rec.H},
    };
    if (out_path.empty())
        std::cout << report.dump(2) << '\n';
    else
        write_json_file(out_path, report);
    return 0;
}

int cmd_check_identities(const PolynomialArgs& pa, int trials, std::uint64_t seed) {
    const GaugePolynomial g = resolve_polynomial(pa);
    const IdentityReport reports[] = {check_gauge_invariance(g, trials, seed), check_charge_identity(g, trials, seed),
                                      check_euler_identity(g, trials, seed), check_wirtinger_fd(g, trials, seed)};
    bool ok = true;
    for (const auto& r : reports) {
        std::printf("%-20s trials=%d max_dev=%.3e max_ratio=%.3e %s\n", r.name.c_str(), r.trials, r.max_deviation,
                    r.max_ratio, r.passed ? "PASS" : "FAIL");
        ok = ok && r.passed;
    }
    return ok ? 0 : static_cast<int>(ErrorCategory::numerical);
}

int cmd_sweep(const std::string& path, const std::string& lambda, bool simulate_rows, const std::string& out) {
    const Scenario s = load_scenario(path);
    const SweepTable t = sweep_dichotomy(s, parse_lambda_range(lambda), simulate_rows, worker_count());
    std::cout << sweep_csv(t);
    if (t.bracket) std::cout << "# verdict changes in [" << t.bracket->first << ", " << t.bracket->second << "]\n";
    std::cout << "# monotone " << (t.monotone ? "yes" : "no") << '\n';
    if (!out.empty()) write_json_file(out, sweep_json(t));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split-step solver and diagnostics for gauge-invariant cubic NLS systems"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario file");
    std::string scenario_path;
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();

    auto* gs = app.add_subcommand("groundstate", "Ground state, g_max and thresholds");
    double omega = 1.0;
    PolynomialArgs gs_poly;
    std::string w_arg = "optimize", gs_out;
    int gs_n = 64;
    double gs_L = 32.0, gs_trunc = 1e-8;
    gs->add_option("--omega", omega, "Frequency omega > 0");
    add_polynomial_options(gs, gs_poly);
    gs->add_option("--w", w_arg, "Direction: 'optimize' or a JSON array of components");
    gs->add_option("--grid", gs_n, "Points per axis");
    gs->add_option("--box", gs_L, "Box side length");
    gs->add_option("--truncation-tol", gs_trunc, "Allowed Q(L/2)/Q(0)");
    gs->add_option("--out", gs_out, "Report path (stdout if omitted)");

    auto* sweep = app.add_subcommand("sweep", "Dichotomy sweep over lambda * u0");
    std::string sweep_path, lambda, sweep_out;
    bool simulate_rows = false;
    sweep->add_option("scenario", sweep_path, "Base scenario JSON")->required();
    sweep->add_option("--lambda", lambda, "Range a:b:step")->required();
    sweep->add_flag("--simulate", simulate_rows, "Also evolve every row");
    sweep->add_option("--out", sweep_out, "JSON table path");

    auto* ids = app.add_subcommand("check-identities", "Structural identities of g and F");
    PolynomialArgs id_poly;
    int trials = 1000;
    std::uint64_t seed = 0;
    add_polynomial_options(ids, id_poly);
    ids->add_option("--trials", trials, "Random samples");
    ids->add_option("--seed", seed, "RNG seed");

    auto* resume = app.add_subcommand("resume", "Continue a run from a checkpoint");
    std::string checkpoint;
    std::optional<double> resume_t_end;
    resume->add_option("checkpoint", checkpoint, "Checkpoint file")->required();
    resume->add_option("--t-end", resume_t_end, "Override the final time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorCategory::usage);
    }

    try {
        if (*run) {
            print_summary(run_scenario(load_scenario(scenario_path)));
            return 0;
        }
        if (*gs) return cmd_groundstate(omega, gs_poly, w_arg, gs_n, gs_L, gs_trunc, gs_out);
        if (*sweep) return cmd_sweep(sweep_path, lambda, simulate_rows, sweep_out);
        if (*ids) return cmd_check_identities(id_poly, trials, seed);
        if (*resume) {
            print_summary(resume_run(checkpoint, resume_t_end));
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::validation);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::numerical);
    }
    return static_cast<int>(ErrorCategory::usage);
}
