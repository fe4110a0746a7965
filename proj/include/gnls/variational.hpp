#pragma once

/**
 * @file variational.hpp
 * @brief System ground states w Q_{omega,g_max}(. - y), sharp thresholds and the
 *        below-threshold dichotomy classifier.
 *
 * The ground states of the system are scalar type: w in T0 (the maximisers of g on
 * the unit sphere) times Q_{omega,g_max} = (omega/g_max)^{1/2} Q(sqrt(omega) x). Some
 * texts write the subscript as g_min in the union over T0; it is g_max throughout here.
 */

#include "gnls/error.hpp"
#include "gnls/functionals.hpp"
#include "gnls/grid.hpp"
#include "gnls/polynomial.hpp"
#include "gnls/profile.hpp"
#include "gnls/sphere.hpp"
#include "gnls/spectral.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

namespace gnls {

struct GroundStateSpec {
    double omega = 1.0;
    double g_max = 1.0;
    ComplexVector w;
    std::array<double, 3> y{};

    /// Checks |w| = 1, g(w) = g_max and the Lagrange condition against `g`.
    void validate(const GaugePolynomial& g, double value_tol = 1e-8, double stationarity_tol = 1e-6) const {
        if (!(omega > 0.0)) throw ValidationError("omega must be positive");
        if (!(g_max > 0.0)) throw NonfocusingError("g_max must be positive");
        if (static_cast<int>(w.size()) != g.n_components()) throw ValidationError("w has the wrong dimension");
        double n2 = 0.0;
        for (const auto& v : w) n2 += std::norm(v);
        if (std::abs(n2 - 1.0) > 1e-10) throw ValidationError("w must be a unit vector");
        if (std::abs(eval_g(g, w) - g_max) > value_tol * std::max(1.0, g_max))
            throw ValidationError("g(w) differs from g_max: w is not in T0");
        if (sphere_stationarity(g, w, g_max) > stationarity_tol)
            throw ValidationError("w violates the stationarity condition F(w) = g_max w");
    }
};

namespace detail {

/// Minimum-image offset of grid coordinate x from c along one axis.
inline double periodic_offset(double x, double c, double L) {
    double d = x - c;
    d -= L * std::round(d / L);
    return d;
}

} // namespace detail

/// Samples u_j(x) = w_j (omega/g_max)^{1/2} Q(sqrt(omega) |x - y|) on the periodic grid.
/// Throws TruncationError when Q_omega at distance L/2 exceeds truncation_tol * Q_omega(0).
inline FieldState build_ground_state(const GroundStateSpec& spec, const RadialProfile& profile, GridDescriptor grid,
                                     double truncation_tol = 1e-8) {
    if (spec.w.empty()) throw ArgumentError("ground state needs a direction w");
    grid.n_components = static_cast<int>(spec.w.size());
    grid.validate();
    const double so = std::sqrt(spec.omega);
    const double edge = profile.value(so * 0.5 * grid.box_length) / profile.q0;
    if (edge > truncation_tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "box too small: Q_omega(L/2)/Q_omega(0) = %.3g exceeds the truncation tolerance %.3g",
                      edge, truncation_tol);
        throw TruncationError(buf);
    }
    const double amp = std::sqrt(spec.omega / spec.g_max);
    FieldState u(grid);
    const int n = grid.n;
    const std::size_t points = grid.points();
    for (int i = 0; i < n; ++i) {
        const double dx = detail::periodic_offset(grid.coordinate(i), spec.y[0], grid.box_length);
        for (int j = 0; j < n; ++j) {
            const double dy = detail::periodic_offset(grid.coordinate(j), spec.y[1], grid.box_length);
            for (int l = 0; l < n; ++l) {
                const double dz = detail::periodic_offset(grid.coordinate(l), spec.y[2], grid.box_length);
                const double q = amp * profile.value(so * std::sqrt(dx * dx + dy * dy + dz * dz));
                const std::size_t p = grid.index(i, j, l);
                for (int c = 0; c < grid.n_components; ++c) u.data[c * points + p] = spec.w[c] * q;
            }
        }
    }
    return u;
}

struct RefineOptions {
    int max_iterations = 500;
    double residual_tol = 1e-12;
};

struct RefineResult {
    FieldState field;
    int iterations = 0;
    double residual = 0.0;   ///< |-Delta phi + omega phi - g_max phi^3| / |phi| on the grid
};

/// Grid ground state: solves the spectrally discretised -Delta phi + omega phi = g_max phi^3 by
/// Petviashvili iteration started from the sampled profile, and returns w phi. The result is an exact
/// stationary state of the semi-discrete flow, so e^{i omega t} w phi solves it exactly.
inline RefineResult refine_ground_state(const GroundStateSpec& spec, const RadialProfile& profile,
                                        const GridDescriptor& grid_in, const RefineOptions& opt = {},
                                        double truncation_tol = 1e-8) {
    GridDescriptor grid = grid_in;
    grid.n_components = 1;
    FieldState phi = build_ground_state({spec.omega, spec.g_max, {complex(1.0)}, spec.y}, profile, grid, truncation_tol);
    Spectral sp(grid);
    const auto& k2 = sp.k_squared();
    const std::size_t points = grid.points();
    ComplexBuffer nl(points);
    auto& u = phi.data;
    RefineResult out;
    for (int it = 0; it < opt.max_iterations; ++it) {
        for (std::size_t p = 0; p < points; ++p) {
            const double v = u[p].real();
            nl[p] = spec.g_max * v * v * v;
        }
        // residual of the current iterate
        auto& lin = sp.work();
        std::copy(u.begin(), u.end(), lin.begin());
        sp.fft().forward(lin);
        for (std::size_t p = 0; p < points; ++p) lin[p] *= (k2[p] + spec.omega);
        sp.fft().backward(lin);
        double res = 0.0, nrm = 0.0;
        for (std::size_t p = 0; p < points; ++p) {
            res += std::norm(lin[p] - nl[p]);
            nrm += std::norm(u[p]);
        }
        out.residual = std::sqrt(res / nrm);
        out.iterations = it;
        if (out.residual <= opt.residual_tol) break;

        sp.fft().forward(std::span(u.data(), points));
        sp.fft().forward(std::span(nl.data(), points));
        double num = 0.0, den = 0.0;
        for (std::size_t p = 0; p < points; ++p) {
            num += (k2[p] + spec.omega) * std::norm(u[p]);
            den += (std::conj(u[p]) * nl[p]).real();
        }
        const double s = std::pow(num / den, 1.5);
        for (std::size_t p = 0; p < points; ++p) u[p] = s * nl[p] / (k2[p] + spec.omega);
        sp.fft().backward(std::span(u.data(), points));
        for (auto& v : u) v = v.real();
    }
    if (!(out.residual <= 1e3 * opt.residual_tol))
        throw SolverError("grid ground state iteration stalled at residual " + std::to_string(out.residual));

    GridDescriptor full = grid_in;
    full.n_components = static_cast<int>(spec.w.size());
    out.field = FieldState(full);
    for (int c = 0; c < full.n_components; ++c)
        for (std::size_t p = 0; p < points; ++p) out.field.data[c * points + p] = spec.w[c] * u[p].real();
    return out;
}

// ---------------------------------------------------------------------------------
// Thresholds
// ---------------------------------------------------------------------------------

struct Thresholds {
    double g_max = 0.0;
    double me_threshold = 0.0;   ///< M(Q)E(Q) of any system ground state = g_max^{-2} M(Q)E(Q)
    double mg_threshold = 0.0;   ///< ||Q||_2 ||grad Q||_2 of a system ground state = g_max^{-1} ||Q|| ||grad Q||
    double hm_threshold = 0.0;   ///< H(Q)M(Q) of a system ground state
    double scalar_mass = 0.0;    ///< M(Q) = 1/2 int Q^2
    double scalar_energy = 0.0;  ///< E(Q) = 1/2 int |grad Q|^2 - 1/4 int Q^4
};

inline Thresholds thresholds(const RadialProfile& profile, double g_max, double closed_form_tol = 1e-5) {
    if (!(g_max > 0.0)) throw NonfocusingError("thresholds need g_max > 0");
    Thresholds t;
    t.g_max = g_max;
    t.scalar_mass = 0.5 * profile.int_q2;
    t.scalar_energy = 0.5 * profile.int_grad2 - 0.25 * profile.int_q4;
    const double me = t.scalar_mass * t.scalar_energy;
    const double mg = std::sqrt(profile.int_q2 * profile.int_grad2);
    // Pohozaev closed forms
    const double me_closed = profile.int_q2 * profile.int_q2 / 4.0;
    const double mg_closed = std::sqrt(3.0) * profile.int_q2;
    if (std::abs(me / me_closed - 1.0) > closed_form_tol || std::abs(mg / mg_closed - 1.0) > closed_form_tol)
        throw ResolutionError("profile integrals disagree with the Pohozaev closed forms");
    t.me_threshold = me / (g_max * g_max);
    t.mg_threshold = mg / g_max;
    t.hm_threshold = 0.5 * profile.int_grad2 * t.scalar_mass / (g_max * g_max);
    return t;
}

// ---------------------------------------------------------------------------------
// Dichotomy
// ---------------------------------------------------------------------------------

enum class DichotomyVerdict { ScatterRegion, BlowupRegion, AboveThreshold, Boundary };

inline const char* to_string(DichotomyVerdict v) {
    switch (v) {
    case DichotomyVerdict::ScatterRegion: return "ScatterRegion";
    case DichotomyVerdict::BlowupRegion: return "BlowupRegion";
    case DichotomyVerdict::AboveThreshold: return "AboveThreshold";
    case DichotomyVerdict::Boundary: return "Boundary";
    }
    return "?";
}

struct Classification {
    DichotomyVerdict verdict = DichotomyVerdict::Boundary;
    FunctionalRecord record;
    double mass_energy = 0.0;       ///< M E
    double mass_kinetic = 0.0;      ///< M H
    double delta = 0.0;             ///< 1 - M E / threshold
    bool kinetic_below = false;     ///< H M < (1 - delta) H(Q)M(Q)
    bool kinetic_above = false;     ///< H M > H(Q)M(Q)
    bool gradient_condition = false;///< ||u|| ||grad u|| < g_max^{-1} ||Q|| ||grad Q||
};

/// Places u0 relative to the ground-state threshold. `tol` is the relative width of the boundary band
/// around M E = threshold and around K = 0 (measured against H).
inline Classification classify(const FieldState& u0, const GaugePolynomial& g, const Thresholds& thr, double tol,
                               Spectral& spec) {
    if (u0.is_zero()) throw ArgumentError("cannot classify the zero field");
    Classification c;
    c.record = functionals(u0, g, 0.0, spec);
    const auto& r = c.record;
    c.mass_energy = r.M * r.E;
    c.mass_kinetic = r.M * r.H;
    c.delta = 1.0 - c.mass_energy / thr.me_threshold;
    c.kinetic_below = c.mass_kinetic < (1.0 - c.delta) * thr.hm_threshold;
    c.kinetic_above = c.mass_kinetic > thr.hm_threshold;
    c.gradient_condition = r.l2_norm() * r.grad_norm() < thr.mg_threshold;

    if (std::abs(c.mass_energy - thr.me_threshold) <= tol * thr.me_threshold)
        c.verdict = DichotomyVerdict::Boundary;
    else if (c.mass_energy > thr.me_threshold)
        c.verdict = DichotomyVerdict::AboveThreshold;
    else if (r.K > tol * r.H)
        c.verdict = DichotomyVerdict::ScatterRegion;
    else if (r.K < -tol * r.H)
        c.verdict = DichotomyVerdict::BlowupRegion;
    else
        c.verdict = DichotomyVerdict::Boundary;
    return c;
}

inline Classification classify(const FieldState& u0, const GaugePolynomial& g, const Thresholds& thr, double tol = 1e-3) {
    Spectral spec(u0.grid);
    return classify(u0, g, thr, tol, spec);
}

} // namespace gnls
