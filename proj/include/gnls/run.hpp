#pragma once

/**
 * @file run.hpp
 * @brief Scenario drivers: single runs with artifacts, checkpoint resume, and the dichotomy sweep.
 */

#include "gnls/checkpoint.hpp"
#include "gnls/diagnostics.hpp"
#include "gnls/error.hpp"
#include "gnls/functionals.hpp"
#include "gnls/profile.hpp"
#include "gnls/scenario.hpp"
#include "gnls/solver.hpp"
#include "gnls/sphere.hpp"
#include "gnls/variational.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace gnls {

/// Scenario-independent precomputation shared by every run on the same polynomial.
struct RunContext {
    GaugePolynomial g;
    RadialProfile profile;
    SphereMaximum sphere;
    Thresholds thresholds;
};

inline const RadialProfile& scalar_ground_state() {
    static const RadialProfile profile = solve_scalar_Q();
    return profile;
}

inline RunContext prepare_context(const Scenario& s) {
    RunContext c{s.build_polynomial(), scalar_ground_state(), {}, {}};
    c.sphere = maximize_g_on_sphere(c.g, 200, s.seed);
    c.thresholds = thresholds(c.profile, c.sphere.g_max);
    return c;
}

namespace detail {

inline FieldState gaussian_field(const InitialData& d, const GridDescriptor& grid) {
    FieldState u(grid);
    const int n = grid.n;
    const std::size_t pts = grid.points();
    const double L = grid.box_length;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const std::array<double, 3> x{grid.coordinate(i), grid.coordinate(j), grid.coordinate(l)};
                double r2 = 0.0, phase = 0.0;
                for (int a = 0; a < 3; ++a) {
                    const double dx = periodic_offset(x[a], d.center[a], L);
                    r2 += dx * dx;
                    phase += d.xi[a] * x[a];
                }
                const complex e = std::exp(-r2 / (2.0 * d.width * d.width)) * std::polar(1.0, phase);
                const std::size_t p = grid.index(i, j, l);
                for (int c = 0; c < grid.n_components; ++c) u.data[c * pts + p] = d.amplitude[c] * e;
            }
    return u;
}

inline GroundStateSpec ground_state_spec(const InitialData& d, const RunContext& ctx) {
    GroundStateSpec spec;
    spec.omega = d.omega;
    spec.g_max = ctx.sphere.g_max;
    spec.y = d.center;
    spec.w = d.w ? *d.w : ctx.sphere.maximizers.front();
    spec.validate(ctx.g);
    return spec;
}

} // namespace detail

/// Builds the initial field described by `d` on `grid` (component count taken from the polynomial).
inline FieldState build_initial_data(const InitialData& d, GridDescriptor grid, const RunContext& ctx) {
    grid.n_components = ctx.g.n_components();
    switch (d.kind) {
    case InitialKind::Soliton:
        return refine_ground_state(detail::ground_state_spec(d, ctx), ctx.profile, grid, {}, d.truncation_tol).field;
    case InitialKind::GroundState:
        return build_ground_state(detail::ground_state_spec(d, ctx), ctx.profile, grid, d.truncation_tol);
    case InitialKind::Gaussian: return detail::gaussian_field(d, grid);
    case InitialKind::FromCheckpoint: {
        Checkpoint cp = read_checkpoint(d.path);
        if (!(cp.state.grid == grid)) throw ValidationError("checkpoint grid differs from the scenario grid");
        return std::move(cp.state);
    }
    case InitialKind::Scaled: {
        FieldState u = build_initial_data(*d.inner, grid, ctx);
        u *= complex(d.lambda);
        return u;
    }
    }
    throw ArgumentError("unknown initial data kind");
}

// ---------------------------------------------------------------------------------
// Single run
// ---------------------------------------------------------------------------------

/// State restored from a checkpoint sidecar.
struct ResumeState {
    double guard_reference = 0.0;
    double s_integral = 0.0;
    double l4 = 0.0;
};

struct RunOutcome {
    std::optional<Classification> classification;  ///< empty for the zero field
    RunResult result;
    std::vector<DiagnosticRow> rows;
    json summary;
};

inline std::string checkpoint_file_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ckpt_%08ld.gnls", step);
    return buf;
}

namespace detail {

inline double relative_drift(double v, double v0, double scale) { return scale > 0.0 ? std::abs(v - v0) / scale : 0.0; }

inline json thresholds_json(const Thresholds& t) {
    return {{"g_max", t.g_max},           {"me_threshold", t.me_threshold}, {"mg_threshold", t.mg_threshold},
            {"hm_threshold", t.hm_threshold}, {"scalar_mass", t.scalar_mass},   {"scalar_energy", t.scalar_energy}};
}

inline json record_json(const FunctionalRecord& r) {
    return {{"M", r.M}, {"H", r.H}, {"G", r.G}, {"E", r.E}, {"K", r.K}, {"P", r.P}};
}

inline void ensure_parent(const std::string& path) {
    const fs::path p(path);
    if (!p.has_parent_path()) return;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + p.parent_path().string());
}

} // namespace detail

/// Runs one scenario end to end and writes the CSV, summary, echo and checkpoints.
inline RunOutcome run_scenario(const Scenario& s, const std::optional<ResumeState>& resume = std::nullopt) {
    const RunContext ctx = prepare_context(s);
    FieldState u0 = build_initial_data(s.initial, s.grid, ctx);

    write_json_file(s.outputs.echo, scenario_to_json(s));

    RunOutcome out;
    Stepper stepper(u0.grid, ctx.g);
    if (!u0.is_zero())
        out.classification = classify(u0, ctx.g, ctx.thresholds, s.diagnostics.classify_tol, stepper.spectral());

    EvolutionConfig cfg = s.evolution;
    cfg.snapshot_every = s.diagnostics.snapshot_every;
    if (resume) cfg.guard_reference = resume->guard_reference;
    const double R = s.diagnostics.radius(s.grid);
    DiagnosticsRecorder recorder(u0.grid, ctx.g, R);
    if (resume) recorder.seed_history(u0.t, resume->l4, resume->s_integral);

    const bool checkpoints = cfg.checkpoint_every > 0;
    if (checkpoints) {
        std::error_code ec;
        fs::create_directories(s.outputs.checkpoint_dir, ec);
        if (ec) throw IoError("cannot create checkpoint directory " + s.outputs.checkpoint_dir);
        write_json_file((fs::path(s.outputs.checkpoint_dir) / "scenario.json").string(), scenario_to_json(s));
    }

    double guard_reference = 0.0;
    SimulationHooks hooks;
    hooks.on_snapshot = [&](const FieldState& u, const SnapshotRecord& rec) { recorder.record(u, rec.functionals); };
    hooks.on_checkpoint = [&](const FieldState& u, long step) {
        const std::string file = (fs::path(s.outputs.checkpoint_dir) / checkpoint_file_name(step)).string();
        write_checkpoint(file, u, cfg.dt);
        double l4 = l4_norm(u), s_int = 0.0;
        if (!recorder.rows().empty() && recorder.rows().back().t == u.t) s_int = recorder.s_integral();
        else l4 = -1.0;  // no snapshot at this checkpoint: history cannot be continued exactly
        write_json_file(file + ".meta.json", {{"guard_reference", guard_reference > 0.0 ? guard_reference : cfg.guard_reference},
                                              {"s_integral", s_int},
                                              {"l4", l4},
                                              {"t", u.t},
                                              {"step", step}});
    };
    if (cfg.guard_reference <= 0.0) {
        guard_reference = stepper.functionals(u0).grad_norm();
        cfg.guard_reference = guard_reference;
    }

    const double t_wrap = estimate_wrap_time(u0, stepper.spectral()) + u0.t;
    out.result = simulate(u0, stepper, cfg, hooks);
    out.rows = recorder.rows();

    detail::ensure_parent(s.outputs.csv);
    write_diagnostics_csv(s.outputs.csv, out.rows);

    // conservation drifts against the first snapshot
    double dm = 0.0, de = 0.0, dp = 0.0;
    if (!out.rows.empty()) {
        const auto& f0 = out.rows.front().f;
        const double p_scale = 2.0 * std::sqrt(f0.M * f0.H);
        for (const auto& r : out.rows) {
            dm = std::max(dm, detail::relative_drift(r.f.M, f0.M, f0.M));
            de = std::max(de, detail::relative_drift(r.f.E, f0.E, std::abs(f0.E)));
            for (int a = 0; a < 3; ++a) dp = std::max(dp, detail::relative_drift(r.f.P[a], f0.P[a], p_scale));
        }
    }
    const ScatteringReport decay = recorder.scattering(t_wrap);

    json summary;
    summary["verdict"] = out.classification ? json(to_string(out.classification->verdict)) : json(nullptr);
    if (out.classification) {
        const auto& c = *out.classification;
        summary["classification"] = {{"mass_energy", c.mass_energy},       {"mass_kinetic", c.mass_kinetic},
                                     {"delta", c.delta},                   {"kinetic_below", c.kinetic_below},
                                     {"kinetic_above", c.kinetic_above},   {"gradient_condition", c.gradient_condition},
                                     {"functionals", detail::record_json(c.record)}};
    }
    summary["thresholds"] = detail::thresholds_json(ctx.thresholds);
    summary["status"] = to_string(out.result.status);
    summary["message"] = out.result.message;
    summary["t_final"] = out.result.t;
    summary["steps"] = out.result.steps;
    summary["guard_reference"] = out.result.guard_reference;
    summary["stability_number"] = cfg.stability_number(s.grid);
    summary["drifts"] = {{"mass", dm}, {"energy", de}, {"momentum", dp}};
    summary["decay_fit"] = {{"available", decay.fit_available},
                            {"exponent", decay.fit_available ? json(decay.exponent) : json(nullptr)},
                            {"tail_decreasing", decay.tail_decreasing},
                            {"t_wrap", std::isfinite(decay.t_wrap) ? json(decay.t_wrap) : json(nullptr)},
                            {"l4_variation", decay.l4_variation}};
    summary["virial"] = {{"R", R}, {"bound_constant", recorder.bound_constant()}};
    summary["sphere"] = {{"g_max", ctx.sphere.g_max}, {"maximizers", ctx.sphere.maximizers.size()}};
    if (s.diagnostics.boost_check) {
        const auto rep = boost_covariance_check(u0, ctx.g, s.diagnostics.xi0, s.evolution.t_end - u0.t, s.evolution);
        summary["boost_check"] = {{"xi0", s.diagnostics.xi0}, {"discrepancy", rep.discrepancy}, {"passed", rep.passed}};
    }
    write_json_file(s.outputs.summary, summary);
    out.summary = std::move(summary);
    return out;
}

/// Continues the run that wrote `checkpoint_path` from its sidecar files. Outputs go to the original
/// paths with ".resumed" inserted before the extension.
inline RunOutcome resume_run(const std::string& checkpoint_path, std::optional<double> t_end = std::nullopt) {
    const fs::path cp = fs::absolute(checkpoint_path);
    if (!fs::exists(cp)) throw IoError("checkpoint not found: " + cp.string());
    const fs::path dir = cp.parent_path();
    const fs::path sidecar = dir / "scenario.json";
    if (!fs::exists(sidecar)) throw IoError("missing scenario sidecar " + sidecar.string());
    Scenario s = scenario_from_json(read_json_file(sidecar.string()), dir);
    const Checkpoint header = read_checkpoint(cp.string());
    if (header.dt != s.evolution.dt) throw ValidationError("checkpoint dt differs from the scenario dt");
    if (t_end) {
        s.evolution.t_end = *t_end;
        s.evolution.validate();
    }

    ResumeState state;
    const std::string meta_path = cp.string() + ".meta.json";
    if (fs::exists(meta_path)) {
        const json meta = read_json_file(meta_path);
        state.guard_reference = meta.value("guard_reference", 0.0);
        state.s_integral = meta.value("s_integral", 0.0);
        state.l4 = meta.value("l4", -1.0);
    }

    InitialData d;
    d.kind = InitialKind::FromCheckpoint;
    d.path = cp.string();
    s.initial = d;
    auto rename = [](const std::string& p) {
        fs::path path(p);
        return (path.parent_path() / (path.stem().string() + ".resumed" + path.extension().string())).string();
    };
    s.outputs.csv = rename(s.outputs.csv);
    s.outputs.summary = rename(s.outputs.summary);
    s.outputs.echo = rename(s.outputs.echo);
    s.outputs.checkpoint_dir = s.outputs.checkpoint_dir + ".resumed";
    return run_scenario(s, state);
}

// ---------------------------------------------------------------------------------
// Dichotomy sweep
// ---------------------------------------------------------------------------------

struct SweepRow {
    double lambda = 0.0;
    bool ok = false;
    std::string error;
    double mass_energy = 0.0;
    double K = 0.0;
    double H = 0.0;
    std::optional<DichotomyVerdict> verdict;
    std::optional<RunStatus> status;  ///< only with simulation
    double t_final = 0.0;
    bool fit_available = false;
    double decay_exponent = 0.0;
    bool tail_decreasing = false;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    bool monotone = true;                                ///< verdict rank never decreases in lambda
    std::optional<std::pair<double, double>> bracket;    ///< lambdas around the first verdict change
};

/// 0 below threshold with K > 0, 1 on the boundary band, 2 otherwise.
inline int verdict_rank(DichotomyVerdict v) {
    switch (v) {
    case DichotomyVerdict::ScatterRegion: return 0;
    case DichotomyVerdict::Boundary: return 1;
    default: return 2;
    }
}

/// Parses "a:b:step" into the inclusive arithmetic sequence a, a+step, ... <= b (with 1e-9 slack).
inline std::vector<double> parse_lambda_range(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("malformed lambda range '" + spec + "' (expected a:b:step)");
        }
    }
    if (parts.size() != 3) throw UsageError("malformed lambda range '" + spec + "' (expected a:b:step)");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0.0) || !(b >= a)) throw UsageError("lambda range needs step > 0 and b >= a");
    std::vector<double> out;
    const long count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
}

inline int worker_count() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("GNLS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw UsageError("GNLS_THREADS must be a positive integer");
        n = std::min<long>(n, v);
    }
    return n;
}

/// Classifies (and optionally evolves) lambda * u0 for each lambda. Rows run on up to `workers` threads
/// and are reported in input order.
inline SweepTable sweep_dichotomy(const Scenario& base, const std::vector<double>& lambdas, bool simulate_rows = false,
                                  int workers = 1) {
    if (lambdas.size() < 2) throw UsageError("a sweep needs at least two lambda values");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i - 1])) throw UsageError("lambda values must be strictly increasing");

    const RunContext ctx = prepare_context(base);
    const FieldState u0 = build_initial_data(base.initial, base.grid, ctx);
    SweepTable table;
    table.rows.resize(lambdas.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        Stepper stepper(u0.grid, ctx.g);
        for (std::size_t i = next++; i < lambdas.size(); i = next++) {
            SweepRow& row = table.rows[i];
            row.lambda = lambdas[i];
            try {
                FieldState u = u0;
                u *= complex(lambdas[i]);
                const Classification c = classify(u, ctx.g, ctx.thresholds, base.diagnostics.classify_tol, stepper.spectral());
                row.mass_energy = c.mass_energy;
                row.K = c.record.K;
                row.H = c.record.H;
                row.verdict = c.verdict;
                if (simulate_rows) {
                    std::vector<double> times, l4;
                    SimulationHooks hooks;
                    hooks.on_snapshot = [&](const FieldState& v, const SnapshotRecord& rec) {
                        times.push_back(rec.t);
                        l4.push_back(l4_norm(v));
                    };
                    const double t_wrap = estimate_wrap_time(u, stepper.spectral()) + u.t;
                    const RunResult r = simulate(u, stepper, base.evolution, hooks);
                    row.status = r.status;
                    row.t_final = r.t;
                    const ScatteringReport rep = scattering_metrics(times, l4, t_wrap);
                    row.fit_available = rep.fit_available;
                    row.decay_exponent = rep.exponent;
                    row.tail_decreasing = rep.tail_decreasing;
                }
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(lambdas.size())));
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    const SweepRow* prev = nullptr;
    for (const auto& row : table.rows) {
        if (!row.ok || !row.verdict) continue;
        if (prev) {
            if (verdict_rank(*row.verdict) < verdict_rank(*prev->verdict)) table.monotone = false;
            if (!table.bracket && *row.verdict != *prev->verdict) table.bracket = std::make_pair(prev->lambda, row.lambda);
        }
        prev = &row;
    }
    return table;
}

inline std::string sweep_csv(const SweepTable& t) {
    std::string s = "lambda,ok,ME,K,H,verdict,status,t_final,decay_exponent,tail_decreasing,error\n";
    for (const auto& r : t.rows) {
        s += format_real(r.lambda) + ',' + (r.ok ? "1" : "0") + ',';
        if (r.ok) {
            s += format_real(r.mass_energy) + ',' + format_real(r.K) + ',' + format_real(r.H) + ',' + to_string(*r.verdict) + ',';
            s += r.status ? std::string(to_string(*r.status)) : std::string();
            s += ',';
            s += r.status ? format_real(r.t_final) : std::string();
            s += ',';
            s += r.fit_available ? format_real(r.decay_exponent) : std::string();
            s += ',';
            s += r.status ? (r.tail_decreasing ? "1" : "0") : "";
            s += ",\n";
        } else {
            std::string msg = r.error;
            for (auto& ch : msg)
                if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
            s += ",,,,,,,," + msg + "\n";
        }
    }
    return s;
}

inline json sweep_json(const SweepTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json j{{"lambda", r.lambda}, {"ok", r.ok}};
        if (r.ok) {
            j["ME"] = r.mass_energy;
            j["K"] = r.K;
            j["H"] = r.H;
            j["verdict"] = to_string(*r.verdict);
            if (r.status) {
                j["status"] = to_string(*r.status);
                j["t_final"] = r.t_final;
                j["decay_exponent"] = r.fit_available ? json(r.decay_exponent) : json(nullptr);
                j["tail_decreasing"] = r.tail_decreasing;
            }
        } else {
            j["error"] = r.error;
        }
        rows.push_back(j);
    }
    json out{{"rows", rows}, {"monotone", t.monotone}};
    out["bracket"] = t.bracket ? json::array({t.bracket->first, t.bracket->second}) : json(nullptr);
    return out;
}

} // namespace gnls
