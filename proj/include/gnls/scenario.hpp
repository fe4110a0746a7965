#pragma once

/**
 * @file scenario.hpp
 * @brief JSON scenario files: strict parsing, defaults, and the fully resolved echo.
 *
 * {
 *   "polynomial":   {"preset": "manakov", "n": 2}  |  {"n": N, "terms": [...]},
 *   "initial_data": {"kind": "soliton" | "ground_state", "omega": 1, "w": [...] (optional), "center": [0,0,0],
 *                    "truncation_tol": 1e-8}
 *                 | {"kind": "gaussian", "amplitude": [a_1, ..., a_N], "width": 1, "center": [...], "xi": [...]}
 *                 | {"kind": "from_checkpoint", "path": "..."}
 *                 | {"kind": "scaled", "lambda": 2.0, "inner": {initial data}},
 *   "grid":         {"n": 64, "L": 32},
 *   "evolution":    {"dt": 1e-3, "t_end": 1, "substeps_nl": 1, "guard_grad_factor": 10,
 *                    "checkpoint_every": 0, "renormalize_density": false},
 *   "diagnostics":  {"R": L/4, "snapshot_every": 10, "boost_check": false, "xi0": [0.5,0,0], "classify_tol": 1e-3},
 *   "outputs":      {"csv": "...", "summary": "...", "checkpoint_dir": "...", "echo": "..."},
 *   "seed": 0
 * }
 *
 * Complex entries (amplitudes, w) are either a number or a [re, im] pair. Relative paths resolve against
 * the directory of the scenario file; the echo stores absolute paths.
 */

#include "gnls/error.hpp"
#include "gnls/grid.hpp"
#include "gnls/polynomial.hpp"
#include "gnls/polynomial_io.hpp"
#include "gnls/solver.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gnls {

namespace fs = std::filesystem;

enum class InitialKind { Soliton, GroundState, Gaussian, FromCheckpoint, Scaled };

inline const char* to_string(InitialKind k) {
    switch (k) {
    case InitialKind::Soliton: return "soliton";
    case InitialKind::GroundState: return "ground_state";
    case InitialKind::Gaussian: return "gaussian";
    case InitialKind::FromCheckpoint: return "from_checkpoint";
    case InitialKind::Scaled: return "scaled";
    }
    return "?";
}

struct InitialData {
    InitialKind kind = InitialKind::Soliton;
    // soliton / ground_state
    double omega = 1.0;
    std::optional<ComplexVector> w;  ///< empty: first maximiser from the sphere optimiser
    double truncation_tol = 1e-8;
    // soliton / ground_state / gaussian
    std::array<double, 3> center{};
    // gaussian: u_j = a_j exp(-|x - c|^2 / (2 width^2)) e^{i xi . x}
    ComplexVector amplitude;
    double width = 1.0;
    std::array<double, 3> xi{};
    // from_checkpoint
    std::string path;
    // scaled
    double lambda = 1.0;
    std::shared_ptr<const InitialData> inner;
};

struct DiagnosticsConfig {
    std::optional<double> R;  ///< default L/4
    int snapshot_every = 10;
    bool boost_check = false;
    std::array<double, 3> xi0{0.5, 0.0, 0.0};
    double classify_tol = 1e-3;

    double radius(const GridDescriptor& g) const { return R.value_or(0.25 * g.box_length); }
};

struct OutputConfig {
    std::string csv;
    std::string summary;
    std::string checkpoint_dir;
    std::string echo;
};

struct Scenario {
    json polynomial;  ///< preset reference or inline table, as written
    InitialData initial;
    GridDescriptor grid;  ///< n_components follows the polynomial
    EvolutionConfig evolution;
    DiagnosticsConfig diagnostics;
    OutputConfig outputs;
    std::uint64_t seed = 0;

    GaugePolynomial build_polynomial() const { return polynomial_from_json(polynomial, "/polynomial"); }
};

json scenario_to_json(const Scenario& s);

inline bool operator==(const Scenario& a, const Scenario& b) { return scenario_to_json(a) == scenario_to_json(b); }

namespace detail {

inline std::array<double, 3> vec3(const json& v, const std::string& ptr) {
    if (!v.is_array() || v.size() != 3) throw ParseError(ptr, "expected an array of 3 numbers");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = jsonutil::number(v[i], ptr + "/" + std::to_string(i));
    return out;
}

inline complex complex_value(const json& v, const std::string& ptr) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2)
        return {jsonutil::number(v[0], ptr + "/0"), jsonutil::number(v[1], ptr + "/1")};
    throw ParseError(ptr, "expected a number or a [re, im] pair");
}

inline ComplexVector complex_vector(const json& v, const std::string& ptr) {
    if (!v.is_array() || v.empty()) throw ParseError(ptr, "expected a non-empty array");
    ComplexVector out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_value(v[i], ptr + "/" + std::to_string(i)));
    return out;
}

inline json complex_to_json(const ComplexVector& z) {
    json a = json::array();
    for (const auto& c : z) a.push_back(json::array({c.real(), c.imag()}));
    return a;
}

inline std::string resolve_path(const std::string& p, const fs::path& base) {
    fs::path path(p);
    if (path.is_relative()) path = base / path;
    return fs::absolute(path).lexically_normal().string();
}

inline double positive(const json& v, const std::string& ptr) {
    const double x = jsonutil::number(v, ptr);
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(ptr + ": must be positive");
    return x;
}

inline InitialData parse_initial(const json& j, const std::string& ptr, const fs::path& base, int n_components) {
    using namespace jsonutil;
    InitialData d;
    const std::string kind = string(require(j, ptr, "kind"), ptr + "/kind");
    if (kind == "soliton" || kind == "ground_state") {
        reject_unknown(j, ptr, {"kind", "omega", "w", "center", "truncation_tol"});
        d.kind = kind == "soliton" ? InitialKind::Soliton : InitialKind::GroundState;
        if (j.contains("omega")) d.omega = positive(j["omega"], ptr + "/omega");
        if (j.contains("w")) {
            d.w = complex_vector(j["w"], ptr + "/w");
            if (static_cast<int>(d.w->size()) != n_components)
                throw ValidationError(ptr + "/w: length differs from the polynomial dimension");
        }
        if (j.contains("center")) d.center = vec3(j["center"], ptr + "/center");
        if (j.contains("truncation_tol")) d.truncation_tol = positive(j["truncation_tol"], ptr + "/truncation_tol");
    } else if (kind == "gaussian") {
        reject_unknown(j, ptr, {"kind", "amplitude", "width", "center", "xi"});
        d.kind = InitialKind::Gaussian;
        d.amplitude = complex_vector(require(j, ptr, "amplitude"), ptr + "/amplitude");
        if (static_cast<int>(d.amplitude.size()) != n_components)
            throw ValidationError(ptr + "/amplitude: one amplitude per component required");
        if (j.contains("width")) d.width = positive(j["width"], ptr + "/width");
        if (j.contains("center")) d.center = vec3(j["center"], ptr + "/center");
        if (j.contains("xi")) d.xi = vec3(j["xi"], ptr + "/xi");
    } else if (kind == "from_checkpoint") {
        reject_unknown(j, ptr, {"kind", "path"});
        d.kind = InitialKind::FromCheckpoint;
        d.path = resolve_path(string(require(j, ptr, "path"), ptr + "/path"), base);
        if (!fs::exists(d.path)) throw ValidationError(ptr + "/path: checkpoint " + d.path + " does not exist");
    } else if (kind == "scaled") {
        reject_unknown(j, ptr, {"kind", "lambda", "inner"});
        d.kind = InitialKind::Scaled;
        d.lambda = number(require(j, ptr, "lambda"), ptr + "/lambda");
        if (!std::isfinite(d.lambda)) throw ValidationError(ptr + "/lambda: must be finite");
        d.inner = std::make_shared<const InitialData>(parse_initial(require(j, ptr, "inner"), ptr + "/inner", base, n_components));
    } else {
        throw ParseError(ptr + "/kind", "unknown initial data kind '" + kind + "'");
    }
    return d;
}

inline json initial_to_json(const InitialData& d) {
    json j{{"kind", to_string(d.kind)}};
    switch (d.kind) {
    case InitialKind::Soliton:
    case InitialKind::GroundState:
        j["omega"] = d.omega;
        if (d.w) j["w"] = complex_to_json(*d.w);
        j["center"] = d.center;
        j["truncation_tol"] = d.truncation_tol;
        break;
    case InitialKind::Gaussian:
        j["amplitude"] = complex_to_json(d.amplitude);
        j["width"] = d.width;
        j["center"] = d.center;
        j["xi"] = d.xi;
        break;
    case InitialKind::FromCheckpoint: j["path"] = d.path; break;
    case InitialKind::Scaled:
        j["lambda"] = d.lambda;
        j["inner"] = initial_to_json(*d.inner);
        break;
    }
    return j;
}

} // namespace detail

/// Parses a scenario document. `base` resolves relative paths; `stem` names default outputs.
inline Scenario scenario_from_json(const json& j, const fs::path& base, const std::string& stem = "scenario") {
    using namespace jsonutil;
    reject_unknown(j, "", {"polynomial", "initial_data", "grid", "evolution", "diagnostics", "outputs", "seed"});
    Scenario s;
    s.polynomial = require(j, "", "polynomial");
    const GaugePolynomial g = s.build_polynomial();
    s.grid.n_components = g.n_components();

    if (j.contains("grid")) {
        const json& gj = j["grid"];
        reject_unknown(gj, "/grid", {"n", "L"});
        if (gj.contains("n")) s.grid.n = static_cast<int>(integer(gj["n"], "/grid/n"));
        if (gj.contains("L")) s.grid.box_length = number(gj["L"], "/grid/L");
    }
    s.grid.validate();

    s.initial = detail::parse_initial(require(j, "", "initial_data"), "/initial_data", base, g.n_components());

    if (j.contains("evolution")) {
        const json& e = j["evolution"];
        reject_unknown(e, "/evolution",
                       {"dt", "t_end", "substeps_nl", "guard_grad_factor", "checkpoint_every", "renormalize_density"});
        auto& c = s.evolution;
        if (e.contains("dt")) c.dt = number(e["dt"], "/evolution/dt");
        if (e.contains("t_end")) c.t_end = number(e["t_end"], "/evolution/t_end");
        if (e.contains("substeps_nl")) c.substeps_nl = static_cast<int>(integer(e["substeps_nl"], "/evolution/substeps_nl"));
        if (e.contains("guard_grad_factor")) c.guard_grad_factor = number(e["guard_grad_factor"], "/evolution/guard_grad_factor");
        if (e.contains("checkpoint_every"))
            c.checkpoint_every = static_cast<int>(integer(e["checkpoint_every"], "/evolution/checkpoint_every"));
        if (e.contains("renormalize_density")) c.renormalize_density = boolean(e["renormalize_density"], "/evolution/renormalize_density");
    }

    if (j.contains("diagnostics")) {
        const json& dj = j["diagnostics"];
        reject_unknown(dj, "/diagnostics", {"R", "snapshot_every", "boost_check", "xi0", "classify_tol"});
        auto& d = s.diagnostics;
        if (dj.contains("R")) d.R = detail::positive(dj["R"], "/diagnostics/R");
        if (dj.contains("snapshot_every")) d.snapshot_every = static_cast<int>(integer(dj["snapshot_every"], "/diagnostics/snapshot_every"));
        if (dj.contains("boost_check")) d.boost_check = boolean(dj["boost_check"], "/diagnostics/boost_check");
        if (dj.contains("xi0")) d.xi0 = detail::vec3(dj["xi0"], "/diagnostics/xi0");
        if (dj.contains("classify_tol")) d.classify_tol = detail::positive(dj["classify_tol"], "/diagnostics/classify_tol");
    }
    s.evolution.snapshot_every = s.diagnostics.snapshot_every;
    s.evolution.validate();
    const double R = s.diagnostics.radius(s.grid);
    if (2.0 * R > 0.5 * s.grid.box_length) throw ValidationError("/diagnostics/R: cutoff support 2R exceeds L/2");
    s.diagnostics.R = R;

    s.outputs = {stem + ".csv", stem + ".summary.json", stem + ".checkpoints", stem + ".resolved.json"};
    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        reject_unknown(o, "/outputs", {"csv", "summary", "checkpoint_dir", "echo"});
        if (o.contains("csv")) s.outputs.csv = string(o["csv"], "/outputs/csv");
        if (o.contains("summary")) s.outputs.summary = string(o["summary"], "/outputs/summary");
        if (o.contains("checkpoint_dir")) s.outputs.checkpoint_dir = string(o["checkpoint_dir"], "/outputs/checkpoint_dir");
        if (o.contains("echo")) s.outputs.echo = string(o["echo"], "/outputs/echo");
    }
    for (auto* p : {&s.outputs.csv, &s.outputs.summary, &s.outputs.checkpoint_dir, &s.outputs.echo})
        *p = detail::resolve_path(*p, base);

    if (j.contains("seed")) {
        const long long seed = integer(j["seed"], "/seed");
        if (seed < 0) throw ValidationError("/seed: must be non-negative");
        s.seed = static_cast<std::uint64_t>(seed);
    }
    return s;
}

/// The fully resolved scenario (all defaults explicit, absolute paths).
inline json scenario_to_json(const Scenario& s) {
    const auto& e = s.evolution;
    const auto& d = s.diagnostics;
    return {
        {"polynomial", s.polynomial},
        {"initial_data", detail::initial_to_json(s.initial)},
        {"grid", {{"n", s.grid.n}, {"L", s.grid.box_length}}},
        {"evolution",
         {{"dt", e.dt}, {"t_end", e.t_end}, {"substeps_nl", e.substeps_nl}, {"guard_grad_factor", e.guard_grad_factor},
          {"checkpoint_every", e.checkpoint_every}, {"renormalize_density", e.renormalize_density}}},
        {"diagnostics",
         {{"R", d.radius(s.grid)}, {"snapshot_every", d.snapshot_every}, {"boost_check", d.boost_check},
          {"xi0", d.xi0}, {"classify_tol", d.classify_tol}}},
        {"outputs",
         {{"csv", s.outputs.csv}, {"summary", s.outputs.summary}, {"checkpoint_dir", s.outputs.checkpoint_dir},
          {"echo", s.outputs.echo}}},
        {"seed", s.seed},
    };
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("", "malformed JSON in " + path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

inline Scenario load_scenario(const std::string& path) {
    const json j = read_json_file(path);
    const fs::path p = fs::absolute(path);
    std::string stem = p.stem().string();
    return scenario_from_json(j, p.parent_path(), stem);
}

} // namespace gnls
