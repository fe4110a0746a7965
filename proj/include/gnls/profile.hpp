#pragma once

/**
 * @file profile.hpp
 * @brief Positive radial solution of -Delta Q + Q = Q^3 in three dimensions.
 *
 * Q is found by shooting on Q(0): the radial ODE
 *
 *     Q'' + (2/r) Q' - Q + Q^3 = 0,   Q'(0) = 0,
 *
 * is integrated with classical RK4 and Q(0) is bisected between trajectories
 * that cross zero (too large) and trajectories that turn back up while still
 * positive (too small). The converged trajectory is trusted up to a matching
 * radius where Q has decayed by 1e-5, and continued beyond with the exact
 * far-field solution c e^{-r} / r of the linearised equation.
 */

#include "gnls/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace gnls {

struct RadialProfile {
    double r_max = 0.0;
    double h = 0.0;                ///< uniform radial spacing
    double q0 = 0.0;               ///< Q(0)
    double match_radius = 0.0;     ///< beyond this radius Q = tail_coeff e^{-r}/r
    double tail_coeff = 0.0;
    std::vector<double> q;         ///< Q(i h)
    std::vector<double> dq;        ///< Q'(i h)
    double int_q2 = 0.0;           ///< int_{R^3} Q^2
    double int_grad2 = 0.0;        ///< int_{R^3} |grad Q|^2
    double int_q4 = 0.0;           ///< int_{R^3} Q^4

    double radius(std::size_t i) const noexcept { return static_cast<double>(i) * h; }

    /// Q(r) by cubic Hermite interpolation of the samples; exact tail beyond the matching radius.
    double value(double r) const noexcept {
        r = std::abs(r);
        if (r >= match_radius) return tail_coeff * std::exp(-r) / r;
        const double s = r / h;
        const std::size_t i = std::min(static_cast<std::size_t>(s), q.size() - 2);
        const double t = s - static_cast<double>(i);
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * q[i] + (t3 - 2 * t2 + t) * h * dq[i] + (-2 * t3 + 3 * t2) * q[i + 1] +
               (t3 - t2) * h * dq[i + 1];
    }

    double derivative(double r) const noexcept {
        r = std::abs(r);
        if (r >= match_radius) return -tail_coeff * std::exp(-r) * (1.0 / r + 1.0 / (r * r));
        const double s = r / h;
        const std::size_t i = std::min(static_cast<std::size_t>(s), q.size() - 2);
        const double t = s - static_cast<double>(i);
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * q[i] + (-6 * t2 + 6 * t) * q[i + 1]) / h + (3 * t2 - 4 * t + 1) * dq[i] +
               (3 * t2 - 2 * t) * dq[i + 1];
    }
};

struct ProfileOptions {
    double step = 1e-3;           ///< RK4 step; also the sample spacing
    double bracket_lo = 2.0;
    double bracket_hi = 10.0;
    double match_fraction = 1e-5; ///< splice the exponential tail once Q <= match_fraction * Q(0)
    double pohozaev_tol = 1e-5;
};

namespace detail {

enum class ShotOutcome { overshoot, undershoot, undecided };

struct RadialState {
    double q, p;
};

inline RadialState radial_rhs(double r, const RadialState& y) {
    return {y.p, -2.0 * y.p / r + y.q - y.q * y.q * y.q};
}

inline RadialState rk4_step(double r, const RadialState& y, double h) {
    auto add = [](const RadialState& a, const RadialState& b, double s) { return RadialState{a.q + s * b.q, a.p + s * b.p}; };
    const RadialState k1 = radial_rhs(r, y);
    const RadialState k2 = radial_rhs(r + 0.5 * h, add(y, k1, 0.5 * h));
    const RadialState k3 = radial_rhs(r + 0.5 * h, add(y, k2, 0.5 * h));
    const RadialState k4 = radial_rhs(r + h, add(y, k3, h));
    return {y.q + h / 6.0 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q), y.p + h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
}

/// Series start at r = h: Q = q0 + c2 r^2 + c4 r^4.
inline RadialState series_start(double q0, double h) {
    const double c2 = (q0 - q0 * q0 * q0) / 6.0;
    const double c4 = (1.0 - 3.0 * q0 * q0) * c2 / 20.0;
    return {q0 + c2 * h * h + c4 * h * h * h * h, 2.0 * c2 * h + 4.0 * c4 * h * h * h};
}

inline ShotOutcome shoot(double q0, double h, double r_limit) {
    RadialState y = series_start(q0, h);
    double r = h;
    while (r < r_limit) {
        y = rk4_step(r, y, h);
        r += h;
        if (y.q <= 0.0) return ShotOutcome::overshoot;
        if (y.p > 0.0) return ShotOutcome::undershoot;
    }
    return ShotOutcome::undecided;
}

inline double trapezoid_r2(const std::vector<double>& f, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = static_cast<double>(i) * h;
        const double w = (i == 0 || i + 1 == f.size()) ? 0.5 : 1.0;
        s += w * r * r * f[i];
    }
    return 4.0 * std::numbers::pi * h * s;
}

} // namespace detail

/// Radial ground state Q with |Q(0) - Q*(0)| <= tol Q(0), sampled on [0, r_max].
inline RadialProfile solve_scalar_Q(double tol = 1e-12, double r_max = 30.0, const ProfileOptions& opt = {}) {
    using detail::ShotOutcome;
    if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
    if (tol < 1e-15) throw ResolutionError("requested Q(0) tolerance is below double precision");
    if (!(opt.step > 0.0) || opt.step > 1e-3) throw ArgumentError("radial step must lie in (0, 1e-3]");
    if (!(r_max > 10.0)) throw ArgumentError("r_max must exceed 10 for the profile to decay");
    const double h = opt.step;
    const double r_limit = r_max;

    double lo = opt.bracket_lo, hi = opt.bracket_hi;
    if (detail::shoot(lo, h, r_limit) != ShotOutcome::undershoot || detail::shoot(hi, h, r_limit) != ShotOutcome::overshoot)
        throw SolverError("shooting bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "] does not enclose Q(0)");
    while (hi - lo > tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const auto outcome = detail::shoot(mid, h, r_limit);
        if (outcome == ShotOutcome::overshoot)
            hi = mid;
        else if (outcome == ShotOutcome::undershoot)
            lo = mid;
        else {
            lo = hi = mid;
        }
    }
    if (hi - lo > tol * lo) throw ResolutionError("Q(0) tolerance unreachable at this radial resolution");

    RadialProfile prof;
    prof.h = h;
    prof.q0 = 0.5 * (lo + hi);
    const std::size_t count = static_cast<std::size_t>(std::llround(r_max / h)) + 1;
    prof.r_max = static_cast<double>(count - 1) * h;
    prof.q.assign(count, 0.0);
    prof.dq.assign(count, 0.0);
    prof.q[0] = prof.q0;
    detail::RadialState y = detail::series_start(prof.q0, h);
    std::size_t i = 1;
    const double match_level = opt.match_fraction * prof.q0;
    for (; i < count; ++i) {
        prof.q[i] = y.q;
        prof.dq[i] = y.p;
        if (y.q <= match_level) break;
        if (y.q <= 0.0 || y.p > 0.0) throw SolverError("converged shot left the positive decreasing branch");
        y = detail::rk4_step(prof.radius(i), y, h);
    }
    if (i >= count) throw ResolutionError("profile did not decay to the matching level within r_max");
    prof.match_radius = prof.radius(i);
    prof.tail_coeff = prof.q[i] * prof.match_radius * std::exp(prof.match_radius);
    for (std::size_t k = i; k < count; ++k) {
        const double r = prof.radius(k);
        prof.q[k] = prof.tail_coeff * std::exp(-r) / r;
        prof.dq[k] = -prof.tail_coeff * std::exp(-r) * (1.0 / r + 1.0 / (r * r));
    }

    if (prof.q.back() > 1e-8 * prof.q0) throw ResolutionError("r_max too small: Q(r_max) > 1e-8 Q(0)");

    std::vector<double> f(count);
    for (std::size_t k = 0; k < count; ++k) f[k] = prof.q[k] * prof.q[k];
    prof.int_q2 = detail::trapezoid_r2(f, h);
    for (std::size_t k = 0; k < count; ++k) f[k] = prof.dq[k] * prof.dq[k];
    prof.int_grad2 = detail::trapezoid_r2(f, h);
    for (std::size_t k = 0; k < count; ++k) f[k] = std::pow(prof.q[k], 4);
    prof.int_q4 = detail::trapezoid_r2(f, h);

    if (std::abs(prof.int_grad2 / prof.int_q2 - 3.0) > 3.0 * opt.pohozaev_tol ||
        std::abs(prof.int_q4 / prof.int_q2 - 4.0) > 4.0 * opt.pohozaev_tol)
        throw ResolutionError("Pohozaev relations violated beyond tolerance; refine the radial step");
    return prof;
}

} // namespace gnls
