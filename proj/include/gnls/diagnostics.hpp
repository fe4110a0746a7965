#pragma once

/**
 * @file diagnostics.hpp
 * @brief Trajectory diagnostics: truncated virial, Galilean boosts, dispersive decay
 *        metrics and the periodic-aware centroid.
 *
 * Truncated virial. With psi(x) = R^2 phi(x/R), phi radial, phi = |x|^2 on |x| <= 1 and
 * phi = 0 on |x| >= 2,
 *
 *     V_R  = int psi sum_j |u_j|^2
 *     V_R' = 2 Im int grad psi . sum_j grad u_j conj(u_j)
 *     V_R''= 8 K(u) + A_R,
 *     A_R  = 4 sum_j int (d_k d_l psi - 2 delta_kl) Re(d_k conj(u_j) d_l u_j)
 *            - int Delta^2 psi sum_j |u_j|^2 - int (Delta psi - 6) g(u),
 *
 * A_R is supported in |x| >= R and |A_R| <= C int_{|x|>=R} sum_j (|grad u_j|^2 + R^-2 |u_j|^2 + |u_j|^4)
 * with C built from sup-norms of the derivatives of phi (see VirialWeight::bound_constant).
 *
 * Between 1 and 2 the radial profile is phi(rho) = rho^2 (1 - S(rho - 1)) with S the order-4
 * smoothstep 126 s^5 - 420 s^6 + 540 s^7 - 315 s^8 + 70 s^9, which makes phi C^4 so that
 * Delta^2 psi is bounded.
 */

#include "gnls/error.hpp"
#include "gnls/functionals.hpp"
#include "gnls/grid.hpp"
#include "gnls/polynomial.hpp"
#include "gnls/solver.hpp"
#include "gnls/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace gnls {

// ---------------------------------------------------------------------------------
// Cutoff weight
// ---------------------------------------------------------------------------------

/// Radial profile f(rho) of phi and its first four derivatives.
struct RadialJet {
    std::array<double, 5> d{};  // f, f', f'', f''', f''''

    double laplacian(double rho) const { return d[2] + 2.0 * d[1] / rho; }
    double laplacian_d1(double rho) const { return d[3] + 2.0 * d[2] / rho - 2.0 * d[1] / (rho * rho); }
    double laplacian_d2(double rho) const {
        return d[4] + 2.0 * d[3] / rho - 4.0 * d[2] / (rho * rho) + 4.0 * d[1] / (rho * rho * rho);
    }
    double bilaplacian(double rho) const { return laplacian_d2(rho) + 2.0 * laplacian_d1(rho) / rho; }
};

namespace detail {

/// Coefficients (ascending powers of s) of (1 + s)^2 (1 - S(s)).
inline std::vector<double> transition_polynomial() {
    std::vector<double> one_minus_s(10, 0.0);
    one_minus_s[0] = 1.0;
    const double smooth[10] = {0, 0, 0, 0, 0, 126, -420, 540, -315, 70};
    for (int i = 0; i < 10; ++i) one_minus_s[i] -= smooth[i];
    const double sq[3] = {1.0, 2.0, 1.0};
    std::vector<double> out(12, 0.0);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 3; ++j) out[i + j] += one_minus_s[i] * sq[j];
    return out;
}

inline double horner_derivative(const std::vector<double>& c, int order, double s) {
    double acc = 0.0;
    for (int i = static_cast<int>(c.size()) - 1; i >= order; --i) {
        double fall = 1.0;
        for (int m = 0; m < order; ++m) fall *= (i - m);
        acc = acc * s + c[i] * fall;
    }
    return acc;
}

} // namespace detail

inline RadialJet weight_jet(double rho) {
    RadialJet j;
    if (rho <= 1.0) {
        j.d = {rho * rho, 2.0 * rho, 2.0, 0.0, 0.0};
    } else if (rho < 2.0) {
        static const std::vector<double> poly = detail::transition_polynomial();
        for (int k = 0; k < 5; ++k) j.d[k] = detail::horner_derivative(poly, k, rho - 1.0);
    }
    return j;
}

/// phi(rho) for the cutoff weight (unit radius).
inline double weight_profile(double rho) { return weight_jet(rho).d[0]; }

/// Sampled weight psi = R^2 phi(x/R) with its gradient, Hessian and the A_R coefficient fields.
class VirialWeight {
public:
    VirialWeight(const GridDescriptor& grid, double R) : grid_(grid), R_(R) {
        if (!(R > 0.0)) throw ArgumentError("virial radius must be positive");
        if (2.0 * R > 0.5 * grid.box_length) throw ArgumentError("virial cutoff support 2R exceeds half the box");
        const std::size_t pts = grid.points();
        psi_.resize(pts);
        for (auto& a : grad_) a.resize(pts);
        for (auto& a : hess_) a.resize(pts);
        bilap_.resize(pts);
        lap_minus6_.resize(pts);
        outside_.resize(pts);
        const int n = grid.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const std::array<double, 3> x{grid.coordinate(i), grid.coordinate(j), grid.coordinate(l)};
                    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
                    const double rho = r / R;
                    const RadialJet jet = weight_jet(rho);
                    const std::size_t p = grid.index(i, j, l);
                    psi_[p] = R * R * jet.d[0];
                    outside_[p] = rho >= 1.0 ? 1 : 0;
                    if (rho <= 1.0) {
                        for (int a = 0; a < 3; ++a) grad_[a][p] = 2.0 * x[a];
                        for (int a = 0; a < 6; ++a) hess_[a][p] = (a < 3) ? 2.0 : 0.0;
                        bilap_[p] = 0.0;
                        lap_minus6_[p] = 0.0;
                        continue;
                    }
                    // d_a psi = R f'(rho) x_a / r ;  d_a d_b psi = (f'' - f'/rho) xh_a xh_b + (f'/rho) delta_ab
                    const double radial = jet.d[1] / rho;
                    for (int a = 0; a < 3; ++a) grad_[a][p] = R * jet.d[1] * x[a] / r;
                    const std::array<double, 3> xh{x[0] / r, x[1] / r, x[2] / r};
                    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
                    for (int a = 0; a < 6; ++a) {
                        const int u = pairs[a][0], v = pairs[a][1];
                        hess_[a][p] = (jet.d[2] - radial) * xh[u] * xh[v] + (u == v ? radial : 0.0);
                    }
                    bilap_[p] = rho < 2.0 ? jet.bilaplacian(rho) / (R * R) : 0.0;
                    lap_minus6_[p] = (rho < 2.0 ? jet.laplacian(rho) : 0.0) - 6.0;
                }
    }

    const GridDescriptor& grid() const noexcept { return grid_; }
    double radius() const noexcept { return R_; }
    const std::vector<double>& values() const noexcept { return psi_; }
    const std::array<std::vector<double>, 3>& gradient() const noexcept { return grad_; }
    /// Hessian entries in the order xx, yy, zz, xy, xz, yz.
    const std::array<std::vector<double>, 6>& hessian() const noexcept { return hess_; }
    const std::vector<double>& bilaplacian() const noexcept { return bilap_; }
    const std::vector<double>& laplacian_minus_six() const noexcept { return lap_minus6_; }
    const std::vector<unsigned char>& outside_mask() const noexcept { return outside_; }

    /// Sup-norm constants of the unit-radius weight on rho >= 1.
    struct Bounds {
        double hessian_dev;    ///< sup ||D^2 phi - 2 I||_op
        double bilaplacian;    ///< sup |Delta^2 phi|
        double laplacian_dev;  ///< sup |Delta phi - 6|
    };

    static Bounds weight_bounds() {
        Bounds b{2.0, 0.0, 6.0};  // values on rho >= 2
        const int samples = 20000;
        for (int s = 0; s <= samples; ++s) {
            const double rho = 1.0 + static_cast<double>(s) / samples;
            const RadialJet j = weight_jet(std::min(rho, 2.0 - 1e-15));
            b.hessian_dev = std::max({b.hessian_dev, std::abs(j.d[2] - 2.0), std::abs(j.d[1] / rho - 2.0)});
            b.bilaplacian = std::max(b.bilaplacian, std::abs(j.bilaplacian(rho)));
            b.laplacian_dev = std::max(b.laplacian_dev, std::abs(j.laplacian(rho) - 6.0));
        }
        return b;
    }

    /// C = max(4 sup|D^2 phi - 2I|, sup|Delta^2 phi|, sup|Delta phi - 6| * c_g * N), with
    /// c_g = sum of |coefficients| >= sup_{|z|=1} |g| and |z|^4 <= N sum_j |z_j|^4.
    static double bound_constant(const GaugePolynomial& g) {
        const Bounds b = weight_bounds();
        return std::max({4.0 * b.hessian_dev, b.bilaplacian, b.laplacian_dev * g.coefficient_l1() * g.n_components()});
    }

private:
    GridDescriptor grid_;
    double R_;
    std::vector<double> psi_;
    std::array<std::vector<double>, 3> grad_;
    std::array<std::vector<double>, 6> hess_;
    std::vector<double> bilap_, lap_minus6_;
    std::vector<unsigned char> outside_;
};

/// R^2 phi(x / R) sampled on the grid.
inline std::vector<double> virial_weight(const GridDescriptor& grid, double R) { return VirialWeight(grid, R).values(); }

struct VirialSample {
    double V = 0.0;
    double Vp = 0.0;
    double K8 = 0.0;
    double tail = 0.0;       ///< int_{|x|>=R} sum_j (|grad u_j|^2 + R^-2 |u_j|^2 + |u_j|^4)
    double A_R_bound = 0.0;  ///< C * tail
    double A_R = 0.0;        ///< the remainder evaluated directly on the grid
};

/// V, V', 8K and the remainder quantities of one snapshot.
inline VirialSample virial_sample(const FieldState& u, const GaugePolynomial& g, const VirialWeight& w, Spectral& spec,
                                  const FunctionalRecord& f, double bound_constant) {
    if (!(u.grid == w.grid())) throw ArgumentError("snapshot grid differs from the weight grid");
    const GridDescriptor& grid = u.grid;
    const std::size_t pts = grid.points();
    const int N = grid.n_components;
    const double dv = grid.cell_volume();
    const double R = w.radius();
    const auto& psi = w.values();
    const auto& gpsi = w.gradient();
    const auto& hess = w.hessian();
    const auto& mask = w.outside_mask();

    VirialSample s;
    s.K8 = 8.0 * f.K;
    std::array<ComplexBuffer, 3> grad;
    for (auto& b : grad) b.resize(pts);
    double v = 0.0, vp = 0.0, tail = 0.0, ar = 0.0;
    for (int c = 0; c < N; ++c) {
        const auto comp = u.component(c);
        for (int a = 0; a < 3; ++a) spec.gradient(comp, a, grad[a]);
        for (std::size_t p = 0; p < pts; ++p) {
            const double rho = std::norm(comp[p]);
            v += psi[p] * rho;
            const complex ub = std::conj(comp[p]);
            vp += gpsi[0][p] * (grad[0][p] * ub).imag() + gpsi[1][p] * (grad[1][p] * ub).imag() +
                  gpsi[2][p] * (grad[2][p] * ub).imag();
            if (!mask[p]) continue;
            const double g2 = std::norm(grad[0][p]) + std::norm(grad[1][p]) + std::norm(grad[2][p]);
            tail += g2 + rho / (R * R) + rho * rho;
            // 4 sum_{k,l} (d_k d_l psi - 2 delta_kl) Re(conj(d_k u) d_l u)
            double q = (hess[0][p] - 2.0) * std::norm(grad[0][p]) + (hess[1][p] - 2.0) * std::norm(grad[1][p]) +
                       (hess[2][p] - 2.0) * std::norm(grad[2][p]);
            q += 2.0 * hess[3][p] * (std::conj(grad[0][p]) * grad[1][p]).real();
            q += 2.0 * hess[4][p] * (std::conj(grad[0][p]) * grad[2][p]).real();
            q += 2.0 * hess[5][p] * (std::conj(grad[1][p]) * grad[2][p]).real();
            ar += 4.0 * q - w.bilaplacian()[p] * rho;
        }
    }
    std::array<complex, kMaxComponents> z{};
    const auto& lap6 = w.laplacian_minus_six();
    for (std::size_t p = 0; p < pts; ++p) {
        if (!mask[p]) continue;
        for (int c = 0; c < N; ++c) z[c] = u.data[c * pts + p];
        ar -= lap6[p] * g.eval_raw(z.data());
    }
    s.V = v * dv;
    s.Vp = 2.0 * vp * dv;
    s.tail = tail * dv;
    s.A_R = ar * dv;
    s.A_R_bound = bound_constant * s.tail;
    return s;
}

/// Centered differences of `values` in `times`; one-sided at the ends.
inline std::vector<double> finite_difference(std::span<const double> times, std::span<const double> values) {
    const std::size_t m = times.size();
    std::vector<double> d(m, 0.0);
    if (m < 2) return d;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == m ? m - 1 : i + 1;
        d[i] = (values[b] - values[a]) / (times[b] - times[a]);
    }
    return d;
}

struct VirialSeries {
    std::vector<double> times, V, Vp, K8, A_R_bound, A_R, Vpp_fd;
    double bound_constant = 0.0;
    double R = 0.0;
};

inline VirialSeries virial_series(std::span<const FieldState> traj, const GaugePolynomial& g, double R) {
    VirialSeries out;
    if (traj.empty()) return out;
    for (const auto& u : traj) require_same_grid(u, traj.front());
    const VirialWeight w(traj.front().grid, R);
    Spectral spec(traj.front().grid);
    out.R = R;
    out.bound_constant = VirialWeight::bound_constant(g);
    for (const auto& u : traj) {
        const auto f = functionals(u, g, 0.0, spec);
        const auto s = virial_sample(u, g, w, spec, f, out.bound_constant);
        out.times.push_back(u.t);
        out.V.push_back(s.V);
        out.Vp.push_back(s.Vp);
        out.K8.push_back(s.K8);
        out.A_R_bound.push_back(s.A_R_bound);
        out.A_R.push_back(s.A_R);
    }
    out.Vpp_fd = finite_difference(out.times, out.Vp);
    return out;
}

// ---------------------------------------------------------------------------------
// Galilean boost
// ---------------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;

/// u -> e^{i x . xi0} u (the boost at t = 0). Exactly periodic only for xi0 in (2 pi / L) Z^3; otherwise
/// the seam error is proportional to the field at the box boundary.
inline FieldState boost(FieldState u, const Vec3& xi0) {
    const auto& grid = u.grid;
    const int n = grid.n;
    const std::size_t pts = grid.points();
    std::vector<complex> px(n), py(n), pz(n);
    for (int m = 0; m < n; ++m) {
        px[m] = std::polar(1.0, xi0[0] * grid.coordinate(m));
        py[m] = std::polar(1.0, xi0[1] * grid.coordinate(m));
        pz[m] = std::polar(1.0, xi0[2] * grid.coordinate(m));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const complex ph = px[i] * py[j] * pz[l];
                const std::size_t p = grid.index(i, j, l);
                for (int c = 0; c < grid.n_components; ++c) u.data[c * pts + p] *= ph;
            }
    return u;
}

/// The full time-t transform e^{i x.xi0} e^{-i t |xi0|^2} T_{2 xi0 t} u.
inline FieldState galilean_transform(FieldState u, const Vec3& xi0, double t, Spectral& spec) {
    const Vec3 shift{2.0 * xi0[0] * t, 2.0 * xi0[1] * t, 2.0 * xi0[2] * t};
    for (int c = 0; c < u.grid.n_components; ++c) spec.translate(u.component(c), shift);
    const double xi2 = xi0[0] * xi0[0] + xi0[1] * xi0[1] + xi0[2] * xi0[2];
    u = boost(std::move(u), xi0);
    u *= std::polar(1.0, -t * xi2);
    return u;
}

struct BoostCovarianceReport {
    double discrepancy = 0.0;  ///< relative L2 distance of the two routes
    double threshold = 1e-5;
    bool passed = false;
};

/// Evolves boost(u0) and compares with the transformed evolution of u0 at t_end.
inline BoostCovarianceReport boost_covariance_check(const FieldState& u0, const GaugePolynomial& g, const Vec3& xi0,
                                                    double t_end, EvolutionConfig cfg, double threshold = 1e-5) {
    const double travel = 2.0 * t_end * std::sqrt(xi0[0] * xi0[0] + xi0[1] * xi0[1] + xi0[2] * xi0[2]);
    if (travel > 0.25 * u0.grid.box_length)
        throw ArgumentError("boost translation 2 |xi0| t_end exceeds a quarter of the box (wrap-around)");
    cfg.t_end = t_end;
    cfg.snapshot_every = 0;
    cfg.checkpoint_every = 0;
    Stepper stepper(u0.grid, g);
    FieldState a = boost(u0, xi0);
    a.t = 0.0;
    FieldState b = u0;
    b.t = 0.0;
    const long steps = cfg.total_steps();
    stepper.advance(a, cfg.dt, steps, cfg);
    stepper.advance(b, cfg.dt, steps, cfg);
    b = galilean_transform(std::move(b), xi0, t_end, stepper.spectral());
    BoostCovarianceReport rep;
    rep.threshold = threshold;
    rep.discrepancy = relative_l2_distance(a, b);
    rep.passed = rep.discrepancy <= threshold;
    return rep;
}

// ---------------------------------------------------------------------------------
// Dispersive decay
// ---------------------------------------------------------------------------------

/// Time before the leading edge of the spectrum travels half a box: L / (2 v_max) with group velocity
/// v = 2|k| taken at the smallest |k| outside of which at most `fraction` of the spectral mass lies.
inline double estimate_wrap_time(const FieldState& u, Spectral& spec, double fraction = 1e-6) {
    const auto& k2 = spec.k_squared();
    std::vector<std::pair<double, double>> shells;
    double total = 0.0;
    std::vector<double> power(u.grid.points(), 0.0);
    for (int c = 0; c < u.grid.n_components; ++c) {
        auto& w = spec.work();
        const auto comp = u.component(c);
        std::copy(comp.begin(), comp.end(), w.begin());
        spec.fft().forward(w);
        for (std::size_t p = 0; p < power.size(); ++p) power[p] += std::norm(w[p]);
    }
    for (std::size_t p = 0; p < power.size(); ++p) total += power[p];
    if (total == 0.0) return std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(power.size());
    for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return k2[a] > k2[b]; });
    double outside = 0.0, kmax = 0.0;
    for (std::size_t idx : order) {
        outside += power[idx];
        if (outside > fraction * total) {
            kmax = std::sqrt(k2[idx]);
            break;
        }
    }
    if (kmax == 0.0) return std::numeric_limits<double>::infinity();
    return u.grid.box_length / (2.0 * 2.0 * kmax);
}

struct ScatteringReport {
    std::vector<double> times, l4, s_norm;
    double t_wrap = std::numeric_limits<double>::infinity();
    bool fit_available = false;
    double exponent = 0.0;          ///< slope of log ||u||_L4 against log t on the tail window
    double intercept = 0.0;
    std::size_t tail_begin = 0, tail_end = 0;  ///< [begin, end) indices of the fit window
    bool tail_decreasing = false;   ///< L4 strictly decreasing on the fit window
    double l4_variation = 0.0;      ///< (max - min) / max of L4 over all snapshots
};

/// Decay metrics from per-snapshot L4 norms. The truncated S-norm (int_0^t ||u||_L4^8)^{1/8} uses the
/// trapezoid rule and is nondecreasing by construction. The fit window is the last half of the
/// snapshots with 0 < t <= t_wrap; at least 4 points are required. Free-like dispersion shows an
/// exponent near -3/4.
inline ScatteringReport scattering_metrics(std::span<const double> times, std::span<const double> l4, double t_wrap) {
    if (times.size() != l4.size()) throw ArgumentError("times and norms differ in length");
    ScatteringReport r;
    r.times.assign(times.begin(), times.end());
    r.l4.assign(l4.begin(), l4.end());
    r.t_wrap = t_wrap;
    r.s_norm.assign(times.size(), 0.0);
    double integral = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        integral += 0.5 * (times[i] - times[i - 1]) * (std::pow(l4[i], 8) + std::pow(l4[i - 1], 8));
        r.s_norm[i] = std::pow(integral, 0.125);
    }
    if (!l4.empty()) {
        const auto [mn, mx] = std::minmax_element(l4.begin(), l4.end());
        r.l4_variation = *mx > 0.0 ? (*mx - *mn) / *mx : 0.0;
    }
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] > 0.0 && times[i] <= t_wrap && l4[i] > 0.0) eligible.push_back(i);
    if (eligible.size() < 2) return r;
    const std::size_t start = eligible.size() / 2;
    if (eligible.size() - start < 4) return r;
    r.tail_begin = eligible[start];
    r.tail_end = eligible.back() + 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(eligible.size() - start);
    r.tail_decreasing = true;
    for (std::size_t e = start; e < eligible.size(); ++e) {
        const std::size_t i = eligible[e];
        const double x = std::log(times[i]), y = std::log(l4[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        if (e > start && !(l4[i] < l4[eligible[e - 1]])) r.tail_decreasing = false;
    }
    r.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    r.intercept = (sy - r.exponent * sx) / m;
    r.fit_available = true;
    return r;
}

inline ScatteringReport scattering_metrics(std::span<const FieldState> traj) {
    std::vector<double> t, l4;
    for (const auto& u : traj) {
        t.push_back(u.t);
        l4.push_back(l4_norm(u));
    }
    double wrap = std::numeric_limits<double>::infinity();
    if (!traj.empty()) {
        Spectral spec(traj.front().grid);
        wrap = estimate_wrap_time(traj.front(), spec) + traj.front().t;
    }
    return scattering_metrics(t, l4, wrap);
}

// ---------------------------------------------------------------------------------
// Centroid
// ---------------------------------------------------------------------------------

/// Mass-weighted circular mean position, per axis, on the periodic box.
inline Vec3 centroid(const FieldState& u) {
    const auto& grid = u.grid;
    const int n = grid.n;
    const std::size_t pts = grid.points();
    std::vector<double> density(pts, 0.0);
    double mass = 0.0;
    for (int c = 0; c < grid.n_components; ++c)
        for (std::size_t p = 0; p < pts; ++p) density[p] += std::norm(u.data[c * pts + p]);
    for (double d : density) mass += d;
    if (!(mass > 0.0)) throw ArgumentError("centroid of a zero-mass field is undefined");
    std::array<std::vector<double>, 3> marginal;
    for (auto& m : marginal) m.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const double d = density[grid.index(i, j, l)];
                marginal[0][i] += d;
                marginal[1][j] += d;
                marginal[2][l] += d;
            }
    Vec3 y{};
    const double L = grid.box_length;
    for (int a = 0; a < 3; ++a) {
        double cs = 0.0, sn = 0.0;
        for (int i = 0; i < n; ++i) {
            const double theta = 2.0 * std::numbers::pi * grid.coordinate(i) / L;
            cs += marginal[a][i] * std::cos(theta);
            sn += marginal[a][i] * std::sin(theta);
        }
        y[a] = L / (2.0 * std::numbers::pi) * std::atan2(sn, cs);
    }
    return y;
}

inline std::vector<Vec3> centroid_track(std::span<const FieldState> traj) {
    std::vector<Vec3> path;
    for (const auto& u : traj) path.push_back(centroid(u));
    return path;
}

// ---------------------------------------------------------------------------------
// Streaming per-snapshot rows and CSV output
// ---------------------------------------------------------------------------------

struct DiagnosticRow {
    double t = 0.0;
    FunctionalRecord f;
    double s_norm = 0.0;
    double l4 = 0.0;
    VirialSample virial;
    Vec3 y{};
};

inline constexpr const char* kDiagnosticCsvHeader =
    "t,M,H,G,E,K,Sx_norm_trunc,L4,Px,Py,Pz,V,Vp,K8,A_R_bound,yx,yy,yz";

/// Accumulates one DiagnosticRow per snapshot of a run.
class DiagnosticsRecorder {
public:
    DiagnosticsRecorder(const GridDescriptor& grid, const GaugePolynomial& g, double R)
        : g_(g), weight_(grid, R), spec_(grid), bound_(VirialWeight::bound_constant(g)) {}

    double bound_constant() const noexcept { return bound_; }
    double radius() const noexcept { return weight_.radius(); }

    const DiagnosticRow& record(const FieldState& u, const FunctionalRecord& f) {
        DiagnosticRow row;
        row.t = u.t;
        row.f = f;
        row.l4 = l4_norm(u);
        if (!rows_.empty()) {
            const auto& prev = rows_.back();
            s_integral_ += 0.5 * (row.t - prev.t) * (std::pow(row.l4, 8) + std::pow(prev.l4, 8));
        } else if (prior_l4_ >= 0.0) {
            s_integral_ += 0.5 * (row.t - prior_t_) * (std::pow(row.l4, 8) + std::pow(prior_l4_, 8));
        }
        row.s_norm = std::pow(s_integral_, 0.125);
        row.virial = virial_sample(u, g_, weight_, spec_, f, bound_);
        row.y = f.M > 0.0 ? centroid(u) : Vec3{};
        rows_.push_back(row);
        return rows_.back();
    }

    const std::vector<DiagnosticRow>& rows() const noexcept { return rows_; }
    double s_integral() const noexcept { return s_integral_; }

    /// Continues the running S-norm integral of an earlier run whose last snapshot was (t, l4).
    void seed_history(double t, double l4, double s_integral) {
        prior_t_ = t;
        prior_l4_ = l4;
        s_integral_ = l4 >= 0.0 ? s_integral : 0.0;
    }

    std::vector<double> times() const {
        std::vector<double> t;
        for (const auto& r : rows_) t.push_back(r.t);
        return t;
    }

    /// Centered finite-difference V'' from the analytic V' series.
    std::vector<double> vpp_fd() const {
        std::vector<double> vp;
        for (const auto& r : rows_) vp.push_back(r.virial.Vp);
        const auto t = times();
        return finite_difference(t, vp);
    }

    ScatteringReport scattering(double t_wrap) const {
        std::vector<double> l4;
        for (const auto& r : rows_) l4.push_back(r.l4);
        return scattering_metrics(times(), l4, t_wrap);
    }

private:
    GaugePolynomial g_;
    VirialWeight weight_;
    Spectral spec_;
    double bound_;
    double s_integral_ = 0.0;
    double prior_t_ = 0.0;
    double prior_l4_ = -1.0;
    std::vector<DiagnosticRow> rows_;
};

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_line(const DiagnosticRow& r) {
    const double vals[] = {r.t, r.f.M, r.f.H, r.f.G, r.f.E, r.f.K, r.s_norm, r.l4, r.f.P[0], r.f.P[1], r.f.P[2],
                           r.virial.V, r.virial.Vp, r.virial.K8, r.virial.A_R_bound, r.y[0], r.y[1], r.y[2]};
    std::string line;
    for (std::size_t i = 0; i < std::size(vals); ++i) {
        if (i) line += ',';
        line += format_real(vals[i]);
    }
    return line;
}

inline void write_diagnostics_csv(const std::string& path, std::span<const DiagnosticRow> rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write diagnostics CSV " + path);
    out << kDiagnosticCsvHeader << '\n';
    for (const auto& r : rows) out << csv_line(r) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

} // namespace gnls
