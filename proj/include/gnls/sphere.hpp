#pragma once

/**
 * @file sphere.hpp
 * @brief Maximisation of g over the unit sphere of C^N (g_max and its maximisers T0).
 *
 * Projected gradient ascent on S^{2N-1} seen as a real manifold. The real gradient of
 * g at z is 2 d g / d conj(z) = 4 F(z); its tangential part is followed with a
 * fixed step and the iterate is renormalised after every step. A maximiser w
 * satisfies the Lagrange condition F(w) = g(w) w.
 */

#include "gnls/error.hpp"
#include "gnls/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace gnls {

struct SphereOptions {
    int max_iterations = 10000;
    double step_scale = 0.1;             ///< step = step_scale / (1 + |dg/dconj(z)|)
    double stationarity_tol = 1e-10;     ///< |F(z) - g(z) z| at convergence
    double dedup_tol = 1e-6;             ///< phase-equivalence tolerance on 1 - |<w1, w2>|
    double maximizer_value_tol = 1e-9;   ///< relative gap below g_max still counted as a maximiser
};

struct SphereMaximum {
    double g_max = 0.0;
    std::vector<ComplexVector> maximizers;  ///< distinct modulo global phase
    int restarts = 0;
    int converged = 0;
};

namespace detail {

inline void normalize(ComplexVector& z) {
    double s = 0.0;
    for (const auto& v : z) s += std::norm(v);
    s = std::sqrt(s);
    for (auto& v : z) v /= s;
}

/// |F(z) - g(z) z| for unit z.
inline double stationarity_residual(const GaugePolynomial& g, const ComplexVector& z) {
    const auto f = eval_F(g, z);
    const double gz = eval_g(g, z);
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) s += std::norm(f[j] - gz * z[j]);
    return std::sqrt(s);
}

/// Rotate the global phase so the largest-modulus component (lowest index on ties) is real positive.
inline void canonical_phase(ComplexVector& z) {
    double best = 0.0;
    for (const auto& v : z) best = std::max(best, std::abs(v));
    for (const auto& v : z)
        if (std::abs(v) >= best - 1e-9) {
            const complex rot = std::conj(v) / std::abs(v);
            for (auto& w : z) w *= rot;
            return;
        }
}

} // namespace detail

/// Lagrange stationarity residual |d g/d conj(z)(w) - 2 g_max w| of a candidate maximiser.
inline double sphere_stationarity(const GaugePolynomial& g, std::span<const complex> w, double g_max) {
    const auto f = eval_F(g, w);
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += std::norm(2.0 * f[j] - 2.0 * g_max * w[j]);
    return std::sqrt(s);
}

inline SphereMaximum maximize_g_on_sphere(const GaugePolynomial& g, int restarts = 200, std::uint64_t seed = 0,
                                          const SphereOptions& opt = {}) {
    if (restarts < 1) throw ArgumentError("restarts must be >= 1");
    const int n = g.n_components();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    struct Candidate {
        ComplexVector z;
        double value;
    };
    std::vector<Candidate> found;
    SphereMaximum out;
    out.restarts = restarts;

    ComplexVector f(n), grad(n);
    for (int r = 0; r < restarts; ++r) {
        ComplexVector z(n);
        for (auto& v : z) v = {normal(rng), normal(rng)};
        detail::normalize(z);
        bool converged = false;
        for (int it = 0; it < opt.max_iterations; ++it) {
            g.apply_F(z.data(), f.data());
            const double gz = g.eval_raw(z.data());
            double res = 0.0, fnorm = 0.0;
            for (int j = 0; j < n; ++j) {
                res += std::norm(f[j] - gz * z[j]);
                fnorm += std::norm(f[j]);
            }
            if (std::sqrt(res) <= opt.stationarity_tol) {
                converged = true;
                break;
            }
            // tangential part of the real gradient 4F: remove the radial component Re<4F, z> z = 4 g(z) z
            for (int j = 0; j < n; ++j) grad[j] = 4.0 * (f[j] - gz * z[j]);
            const double step = opt.step_scale / (1.0 + 2.0 * std::sqrt(fnorm));
            for (int j = 0; j < n; ++j) z[j] += step * grad[j];
            detail::normalize(z);
        }
        if (!converged) continue;
        ++out.converged;
        found.push_back({z, eval_g(g, z)});
    }
    if (found.empty())
        throw OptimizerError("sphere optimiser did not converge in " + std::to_string(opt.max_iterations) + " iterations");

    out.g_max = std::max_element(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
                    return a.value < b.value;
                })->value;
    if (!(out.g_max > 0.0))
        throw NonfocusingError("max of g on the unit sphere is " + std::to_string(out.g_max) + " <= 0: no ground state");

    const double cutoff = out.g_max - opt.maximizer_value_tol * std::max(1.0, std::abs(out.g_max));
    for (auto& c : found) {
        if (c.value < cutoff) continue;
        bool duplicate = false;
        for (const auto& w : out.maximizers) {
            complex inner = 0.0;
            for (int j = 0; j < n; ++j) inner += std::conj(w[j]) * c.z[j];
            if (1.0 - std::abs(inner) <= opt.dedup_tol) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        detail::canonical_phase(c.z);
        out.maximizers.push_back(c.z);
    }
    return out;
}

} // namespace gnls
