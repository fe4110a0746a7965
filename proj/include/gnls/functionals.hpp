#pragma once

/**
 * @file functionals.hpp
 * @brief Mass, kinetic, potential, energy, virial functional, action and momentum.
 *
 *   M = 1/2 int sum |u_j|^2          H = 1/2 int sum |grad u_j|^2     G = 1/4 int g(u)
 *   E = H - G      K = 2H - 3G       S_omega = E + omega M            P = sum_j Im int conj(u_j) grad u_j
 *
 * Integrals are grid Riemann sums; gradients are spectral (Parseval).
 */

#include "gnls/grid.hpp"
#include "gnls/polynomial.hpp"
#include "gnls/spectral.hpp"

#include <array>
#include <cmath>

namespace gnls {

struct FunctionalRecord {
    double M = 0.0;
    double H = 0.0;
    double G = 0.0;
    double E = 0.0;
    double K = 0.0;
    double S_omega = 0.0;
    std::array<double, 3> P{};

    double grad_norm() const { return std::sqrt(2.0 * H); }   ///< ||grad u||_{(L^2)^N}
    double l2_norm() const { return std::sqrt(2.0 * M); }     ///< ||u||_{(L^2)^N}
};

/// int g(u) dx as a grid sum.
inline double potential_integral(const FieldState& u, const GaugePolynomial& g) {
    const int n = u.grid.n_components;
    if (n != g.n_components()) throw ArgumentError("field and polynomial component counts differ");
    const std::size_t points = u.grid.points();
    std::array<complex, kMaxComponents> z{};
    double s = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        for (int j = 0; j < n; ++j) z[j] = u.data[j * points + p];
        s += g.eval_raw(z.data());
    }
    return s * u.grid.cell_volume();
}

inline FunctionalRecord functionals(const FieldState& u, const GaugePolynomial& g, double omega, Spectral& spec) {
    if (!(spec.grid() == u.grid)) throw ArgumentError("spectral workspace built for a different grid");
    if (!u.all_finite()) throw DataError("field contains non-finite values");
    const double dv = u.grid.cell_volume();
    FunctionalRecord r;
    double mass = 0.0;
    for (const auto& v : u.data) mass += std::norm(v);
    r.M = 0.5 * mass * dv;
    double grad2 = 0.0;
    for (int j = 0; j < u.grid.n_components; ++j) {
        const auto m = spec.moments(u.component(j));
        grad2 += m.grad2;
        for (int a = 0; a < 3; ++a) r.P[a] += m.momentum[a] * dv;
    }
    r.H = 0.5 * grad2 * dv;
    r.G = 0.25 * potential_integral(u, g);
    r.E = r.H - r.G;
    r.K = 2.0 * r.H - 3.0 * r.G;
    r.S_omega = r.E + omega * r.M;
    return r;
}

inline FunctionalRecord functionals(const FieldState& u, const GaugePolynomial& g, double omega = 0.0) {
    Spectral spec(u.grid);
    return functionals(u, g, omega, spec);
}

/// ||u||_{(L^4)^N} = (sum_j ||u_j||_{L^4}^2)^{1/2}
inline double l4_norm(const FieldState& u) {
    const double dv = u.grid.cell_volume();
    double s = 0.0;
    for (int j = 0; j < u.grid.n_components; ++j) {
        double q = 0.0;
        for (const auto& v : u.component(j)) q += std::norm(v) * std::norm(v);
        s += std::sqrt(q * dv);
    }
    return std::sqrt(s);
}

} // namespace gnls
