#pragma once

/**
 * @file solver.hpp
 * @brief Strang split-step Fourier integrator for i u_t + Delta u + F(u) = 0 on the periodic box.
 *
 * Linear part: each component is multiplied in Fourier space by exp(-i |k|^2 tau).
 * Nonlinear part: the pointwise ODE du/dt = i F(u) is integrated node by node with
 * classical RK4. The pointwise flow conserves sum_j |u_j|^2 exactly because
 * sum_j Im(F_j(z) conj(z_j)) = 0; RK4 conserves it to O(tau^5) per substep.
 *
 * simulate() fuses the adjacent linear half steps between observation points.
 * Observation points sit at absolute step indices, so a run resumed from a
 * checkpoint replays exactly the same operation sequence as the uninterrupted run.
 */

#include "gnls/error.hpp"
#include "gnls/functionals.hpp"
#include "gnls/grid.hpp"
#include "gnls/polynomial.hpp"
#include "gnls/spectral.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <list>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gnls {

struct EvolutionConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int substeps_nl = 1;
    double guard_grad_factor = 10.0;
    int snapshot_every = 10;
    int checkpoint_every = 0;          ///< 0 disables checkpoints
    bool renormalize_density = false;  ///< project each node back to its pre-step density
    double guard_reference = 0.0;      ///< ||grad u|| the guard compares against; 0 = initial value

    bool operator==(const EvolutionConfig&) const = default;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
        if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be non-negative");
        if (substeps_nl < 1) throw ValidationError("substeps_nl must be >= 1");
        if (!(guard_grad_factor > 1.0)) throw ValidationError("guard_grad_factor must exceed 1");
        if (snapshot_every < 0 || checkpoint_every < 0) throw ValidationError("cadences must be non-negative");
        const double steps = t_end / dt;
        if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
            throw ValidationError("t_end must be an integer multiple of dt");
    }

    long total_steps() const { return std::lround(t_end / dt); }

    /// dt / dx^2: recorded with outputs as the usual explicit-scheme heuristic (the linear step itself is exact).
    double stability_number(const GridDescriptor& g) const { return dt / (g.dx() * g.dx()); }
};

struct NonlinearStepStats {
    double max_density_change = 0.0;  ///< max over nodes of |rho_after - rho_before| / rho_before
};

/// Owns the spectral workspace and the cached linear multipliers for one grid and one nonlinearity.
class Stepper {
public:
    Stepper(const GridDescriptor& grid, GaugePolynomial g) : grid_(grid), g_(std::move(g)), spectral_(grid) {
        if (grid.n_components != g_.n_components())
            throw ArgumentError("grid component count differs from the polynomial dimension");
    }

    const GridDescriptor& grid() const noexcept { return grid_; }
    const GaugePolynomial& polynomial() const noexcept { return g_; }
    Spectral& spectral() noexcept { return spectral_; }

    /// Free flow exp(i tau Delta) applied exactly in Fourier space.
    void linear_step(FieldState& u, double tau) {
        check(u);
        if (tau == 0.0) return;
        const auto& mult = multiplier(tau);
        for (int c = 0; c < grid_.n_components; ++c) {
            auto comp = u.component(c);
            spectral_.fft().forward(comp);
            for (std::size_t p = 0; p < comp.size(); ++p) comp[p] *= mult[p];
            spectral_.fft().backward(comp);
        }
    }

    /// Pointwise RK4 for du/dt = i F(u) over time tau in `substeps` equal pieces.
    NonlinearStepStats nonlinear_step(FieldState& u, double tau, int substeps, bool renormalize = false) {
        check(u);
        if (substeps < 1) throw ArgumentError("substeps must be >= 1");
        NonlinearStepStats stats;
        if (g_.is_zero() || tau == 0.0) return stats;
        const int n = grid_.n_components;
        const std::size_t points = grid_.points();
        const double h = tau / substeps;
        const complex ih(0.0, h);
        std::array<complex, kMaxComponents> z{}, z0{}, tmp{}, k1{}, k2{}, k3{}, k4{};
        bool finite = true;
        for (std::size_t p = 0; p < points; ++p) {
            double rho0 = 0.0;
            for (int j = 0; j < n; ++j) {
                z[j] = u.data[j * points + p];
                z0[j] = z[j];
                rho0 += std::norm(z[j]);
            }
            if (rho0 == 0.0) continue;
            for (int s = 0; s < substeps; ++s) {
                g_.apply_F(z.data(), k1.data());
                for (int j = 0; j < n; ++j) tmp[j] = z[j] + 0.5 * ih * k1[j];
                g_.apply_F(tmp.data(), k2.data());
                for (int j = 0; j < n; ++j) tmp[j] = z[j] + 0.5 * ih * k2[j];
                g_.apply_F(tmp.data(), k3.data());
                for (int j = 0; j < n; ++j) tmp[j] = z[j] + ih * k3[j];
                g_.apply_F(tmp.data(), k4.data());
                for (int j = 0; j < n; ++j) z[j] += ih / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            double rho = 0.0;
            for (int j = 0; j < n; ++j) rho += std::norm(z[j]);
            if (!std::isfinite(rho)) {
                finite = false;
                break;
            }
            stats.max_density_change = std::max(stats.max_density_change, std::abs(rho - rho0) / rho0);
            if (renormalize && rho > 0.0) {
                const double s = std::sqrt(rho0 / rho);
                for (int j = 0; j < n; ++j) z[j] *= s;
            }
            for (int j = 0; j < n; ++j) u.data[j * points + p] = z[j];
        }
        if (!finite) throw OverflowError("non-finite values in the nonlinear substep (blowup)");
        return stats;
    }

    /// L(dt/2) N(dt) L(dt/2)
    void strang_step(FieldState& u, double dt, const EvolutionConfig& cfg) {
        linear_step(u, 0.5 * dt);
        nonlinear_step(u, dt, cfg.substeps_nl, cfg.renormalize_density);
        linear_step(u, 0.5 * dt);
        u.t += dt;
    }

    /// `steps` Strang steps with the interior linear half steps fused.
    void advance(FieldState& u, double dt, long steps, const EvolutionConfig& cfg) {
        if (steps <= 0) return;
        linear_step(u, 0.5 * dt);
        for (long s = 0; s < steps; ++s) {
            nonlinear_step(u, dt, cfg.substeps_nl, cfg.renormalize_density);
            linear_step(u, s + 1 < steps ? dt : 0.5 * dt);
        }
    }

    FunctionalRecord functionals(const FieldState& u, double omega = 0.0) {
        return gnls::functionals(u, g_, omega, spectral_);
    }

private:
    void check(const FieldState& u) const {
        if (!(u.grid == grid_)) throw ArgumentError("field grid differs from the stepper grid");
    }

    const ComplexBuffer& multiplier(double tau) {
        for (auto it = cache_.begin(); it != cache_.end(); ++it)
            if (it->first == tau) {
                cache_.splice(cache_.begin(), cache_, it);
                return cache_.front().second;
            }
        ComplexBuffer m(grid_.points());
        const auto& k2 = spectral_.k_squared();
        for (std::size_t p = 0; p < m.size(); ++p) m[p] = std::polar(1.0, -k2[p] * tau);
        cache_.emplace_front(tau, std::move(m));
        if (cache_.size() > 4) cache_.pop_back();
        return cache_.front().second;
    }

    GridDescriptor grid_;
    GaugePolynomial g_;
    Spectral spectral_;
    std::list<std::pair<double, ComplexBuffer>> cache_;
};

// Convenience free functions (each builds a throwaway Stepper).

inline FieldState linear_step(FieldState u, double tau) {
    GaugePolynomial zero(u.grid.n_components);
    Stepper(u.grid, zero).linear_step(u, tau);
    return u;
}

inline FieldState nonlinear_step(FieldState u, const GaugePolynomial& g, double tau, int substeps) {
    Stepper(u.grid, g).nonlinear_step(u, tau, substeps);
    return u;
}

inline FieldState strang_step(FieldState u, const GaugePolynomial& g, double dt, const EvolutionConfig& cfg) {
    Stepper(u.grid, g).strang_step(u, dt, cfg);
    return u;
}

// ---------------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------------

enum class RunStatus { Completed, Blowup };

inline const char* to_string(RunStatus s) { return s == RunStatus::Completed ? "Completed" : "Blowup"; }

struct SnapshotRecord {
    long step = 0;
    double t = 0.0;
    FunctionalRecord functionals;
};

struct RunResult {
    RunStatus status = RunStatus::Completed;
    long steps = 0;            ///< absolute step index reached
    double t = 0.0;
    std::string message;
    double guard_reference = 0.0;
    std::vector<SnapshotRecord> records;
    FieldState final_state;
};

/// Observers called at observation points; all receive immutable views.
struct SimulationHooks {
    std::function<void(const FieldState&, const SnapshotRecord&)> on_snapshot;
    std::function<void(const FieldState&, long step)> on_checkpoint;
};

/// Advances u0 to cfg.t_end. u0.t must be an integer multiple of dt (the absolute step index).
inline RunResult simulate(FieldState u, Stepper& stepper, const EvolutionConfig& cfg, const SimulationHooks& hooks = {}) {
    cfg.validate();
    if (!u.all_finite()) throw DataError("initial field contains non-finite values");
    const double dt = cfg.dt;
    const long total = cfg.total_steps();
    long k = std::lround(u.t / dt);
    if (std::abs(static_cast<double>(k) * dt - u.t) > 1e-9 * std::max(1.0, std::abs(u.t)))
        throw ValidationError("start time is not a multiple of dt");
    if (k > total) throw ValidationError("start time lies beyond t_end");
    u.t = static_cast<double>(k) * dt;

    RunResult res;
    auto observe = [&](long step, bool snapshot, bool checkpoint) -> bool {
        SnapshotRecord rec{step, u.t, stepper.functionals(u)};
        const double grad = rec.functionals.grad_norm();
        if (snapshot) {
            res.records.push_back(rec);
            if (hooks.on_snapshot) hooks.on_snapshot(u, rec);
        }
        if (checkpoint && hooks.on_checkpoint) hooks.on_checkpoint(u, step);
        if (res.guard_reference > 0.0 && grad > cfg.guard_grad_factor * res.guard_reference) {
            res.status = RunStatus::Blowup;
            res.message = "gradient norm exceeded " + std::to_string(cfg.guard_grad_factor) + "x its reference";
            return false;
        }
        return true;
    };

    const FunctionalRecord initial = stepper.functionals(u);
    res.guard_reference = cfg.guard_reference > 0.0 ? cfg.guard_reference : initial.grad_norm();

    auto is_snapshot = [&](long s) { return s == total || (cfg.snapshot_every > 0 && s % cfg.snapshot_every == 0); };
    auto is_checkpoint = [&](long s) { return cfg.checkpoint_every > 0 && (s % cfg.checkpoint_every == 0 || s == total); };

    bool running = observe(k, true, false);
    while (running && k < total) {
        long next = total;
        if (cfg.snapshot_every > 0) next = std::min(next, (k / cfg.snapshot_every + 1) * cfg.snapshot_every);
        if (cfg.checkpoint_every > 0) next = std::min(next, (k / cfg.checkpoint_every + 1) * cfg.checkpoint_every);
        try {
            stepper.advance(u, dt, next - k, cfg);
        } catch (const OverflowError& e) {
            res.status = RunStatus::Blowup;
            res.message = e.what();
            u.t = static_cast<double>(next) * dt;
            k = next;
            break;
        }
        k = next;
        u.t = static_cast<double>(k) * dt;
        if (!u.all_finite()) {
            res.status = RunStatus::Blowup;
            res.message = "non-finite field values";
            break;
        }
        running = observe(k, is_snapshot(k), is_checkpoint(k));
    }
    res.steps = k;
    res.t = u.t;
    res.final_state = std::move(u);
    return res;
}

inline RunResult simulate(const FieldState& u0, const GaugePolynomial& g, const EvolutionConfig& cfg,
                          const SimulationHooks& hooks = {}) {
    Stepper stepper(u0.grid, g);
    return simulate(u0, stepper, cfg, hooks);
}

} // namespace gnls
