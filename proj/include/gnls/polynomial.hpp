#pragma once

/**
 * @file polynomial.hpp
 * @brief Gauge-invariant real quartic polynomials g : C^N -> R.
 *
 * A polynomial is a table of coefficients over monomials
 *
 *     z^alpha conj(z)^beta = prod_j z_j^alpha_j conj(z_j)^beta_j,  |alpha| = |beta| = 2.
 *
 * Equal holomorphic and antiholomorphic degree is exactly phase invariance for a
 * quartic. Real coefficients together with the mirror rule c(beta, alpha) = c(alpha, beta)
 * make g real valued. Only one representative of each mirror pair is stored; both are
 * materialised in the evaluation tables.
 *
 * The nonlinearity of the evolution is F_j = (1/2) d g / d conj(z_j) (Wirtinger derivative).
 */

#include "gnls/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace gnls {

using complex = std::complex<double>;
using ComplexVector = std::vector<complex>;

/// Upper bound on the number of coupled components (fixed-size per-node scratch).
inline constexpr int kMaxComponents = 16;

/// Exponent pair (alpha, beta) of one quartic monomial.
struct MultiIndexPair {
    std::vector<int> alpha;
    std::vector<int> beta;

    auto operator<=>(const MultiIndexPair&) const = default;
    bool operator==(const MultiIndexPair&) const = default;

    MultiIndexPair mirrored() const { return {beta, alpha}; }

    /// Throws ArgumentError unless entries are >= 0 and |alpha| = |beta| = 2.
    void validate(int n) const {
        if (static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
            throw ArgumentError("multi-index length differs from the component count");
        int sa = 0, sb = 0;
        for (int j = 0; j < n; ++j) {
            if (alpha[j] < 0 || beta[j] < 0)
                throw ArgumentError("multi-index entries must be non-negative");
            sa += alpha[j];
            sb += beta[j];
        }
        if (sa != 2 || sb != 2)
            throw ArgumentError("monomial must satisfy |alpha| = |beta| = 2 (gauge invariant quartic)");
    }
};

namespace detail {

/// Indices (a, b) with a <= b such that z^alpha = z_a z_b.
inline std::array<int, 2> index_pair(const std::vector<int>& e) {
    std::array<int, 2> out{-1, -1};
    int k = 0;
    for (int j = 0; j < static_cast<int>(e.size()); ++j)
        for (int m = 0; m < e[j]; ++m) out[k++] = j;
    return out;
}

/// Plain complex product (no Annex G inf/nan recovery, which the default operator* pays for).
inline complex cmul(complex x, complex y) noexcept {
    return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

inline void check_dim(std::size_t got, int n) {
    if (static_cast<int>(got) != n)
        throw ArgumentError("vector dimension " + std::to_string(got) + " does not match polynomial dimension " +
                            std::to_string(n));
}

} // namespace detail

class GaugePolynomial {
public:
    /// One materialised monomial coeff * z_a z_b conj(z_c z_d).
    struct Monomial {
        double coeff;
        int a, b, c, d;
    };

    /// One contribution coeff * z_a z_b conj(z_k) to F_j.
    struct DerivativeTerm {
        int j;
        double coeff;
        int a, b, k;
    };

    GaugePolynomial() = default;

    /// Zero polynomial on C^n.
    explicit GaugePolynomial(int n) : n_(n) {
        if (n < 1 || n > kMaxComponents)
            throw ArgumentError("component count must lie in [1, " + std::to_string(kMaxComponents) + "]");
    }

    /// Build from (pair, coefficient) entries. Each entry sets the coefficient of the pair and of
    /// its mirror; repeated entries for the same mirror class are summed.
    static GaugePolynomial from_terms(int n, const std::vector<std::pair<MultiIndexPair, double>>& terms) {
        GaugePolynomial g(n);
        for (const auto& [pair, c] : terms) g.add_term(pair, c);
        return g;
    }

    /// Add `coeff` to the mirror class of `pair`.
    void add_term(const MultiIndexPair& pair, double coeff) {
        pair.validate(n_);
        if (!std::isfinite(coeff)) throw ArgumentError("coefficient must be finite");
        const MultiIndexPair key = canonical(pair);
        double& slot = terms_[key];
        slot += coeff;
        if (slot == 0.0) terms_.erase(key);
        compile();
    }

    int n_components() const noexcept { return n_; }

    /// Canonical table: lexicographically least representative of each mirror pair -> coefficient.
    const std::map<MultiIndexPair, double>& terms() const noexcept { return terms_; }

    const std::vector<Monomial>& monomials() const noexcept { return monomials_; }
    const std::vector<DerivativeTerm>& derivative_terms() const noexcept { return derivative_; }

    bool is_zero() const noexcept { return terms_.empty(); }

    /// c * g
    GaugePolynomial scaled(double c) const {
        GaugePolynomial out(n_);
        if (c != 0.0)
            for (const auto& [pair, coeff] : terms_) out.terms_[pair] = c * coeff;
        out.compile();
        return out;
    }

    /// Crude bound sup_{|z| = 1} |g(z)| <= sum of |coefficients| over materialised monomials.
    double coefficient_l1() const {
        double s = 0.0;
        for (const auto& m : monomials_) s += std::abs(m.coeff);
        return s;
    }

    bool operator==(const GaugePolynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

    static MultiIndexPair canonical(const MultiIndexPair& p) {
        MultiIndexPair m = p.mirrored();
        return m < p ? m : p;
    }

    // -- hot-path kernels over raw component values ---------------------------------

    /// g(z) accumulated in complex arithmetic; the imaginary part is returned through `imag`.
    double eval_raw(const complex* z, double* imag = nullptr) const {
        complex acc = 0.0;
        for (const auto& m : monomials_)
            acc += m.coeff * detail::cmul(detail::cmul(z[m.a], z[m.b]), std::conj(detail::cmul(z[m.c], z[m.d])));
        if (imag) *imag = acc.imag();
        return acc.real();
    }

    /// out[j] = F_j(z)
    void apply_F(const complex* z, complex* out) const {
        for (int j = 0; j < n_; ++j) out[j] = 0.0;
        for (const auto& t : derivative_)
            out[t.j] += t.coeff * detail::cmul(detail::cmul(z[t.a], z[t.b]), std::conj(z[t.k]));
    }

private:
    void compile() {
        monomials_.clear();
        derivative_.clear();
        auto push = [this](const std::vector<int>& alpha, const std::vector<int>& beta, double c) {
            const auto [a, b] = detail::index_pair(alpha);
            const auto [cc, d] = detail::index_pair(beta);
            monomials_.push_back({c, a, b, cc, d});
            // d/d conj(z_j) of conj(z_c z_d), times the 1/2 of F_j = (1/2) dg/dconj(z_j)
            if (cc == d) {
                derivative_.push_back({cc, c, a, b, cc});
            } else {
                derivative_.push_back({cc, 0.5 * c, a, b, d});
                derivative_.push_back({d, 0.5 * c, a, b, cc});
            }
        };
        for (const auto& [pair, c] : terms_) {
            push(pair.alpha, pair.beta, c);
            if (pair.alpha != pair.beta) push(pair.beta, pair.alpha, c);
        }
        std::stable_sort(derivative_.begin(), derivative_.end(),
                         [](const DerivativeTerm& x, const DerivativeTerm& y) { return x.j < y.j; });
    }

    int n_ = 0;
    std::map<MultiIndexPair, double> terms_;
    std::vector<Monomial> monomials_;
    std::vector<DerivativeTerm> derivative_;
};

// ---------------------------------------------------------------------------------
// Pointwise operations
// ---------------------------------------------------------------------------------

/// g(z). The accumulated imaginary part must vanish to rounding; it is checked and discarded.
inline double eval_g(const GaugePolynomial& g, std::span<const complex> z) {
    detail::check_dim(z.size(), g.n_components());
    double im = 0.0;
    const double re = g.eval_raw(z.data(), &im);
    double scale = 0.0;
    for (const auto& m : g.monomials()) scale += std::abs(m.coeff * z[m.a] * z[m.b] * z[m.c] * z[m.d]);
    if (std::abs(im) > 1e-12 * (1.0 + std::max(std::abs(re), scale)))
        throw SolverError("g(z) has a non-negligible imaginary part; coefficient table is not real");
    return re;
}

/// F(z) with F_j = (1/2) d g / d conj(z_j).
inline ComplexVector eval_F(const GaugePolynomial& g, std::span<const complex> z) {
    detail::check_dim(z.size(), g.n_components());
    ComplexVector out(z.size());
    g.apply_F(z.data(), out.data());
    return out;
}

/// Directional derivative of g at z along dz: 4 sum_j Re(F_j(z) conj(dz_j)).
inline double eval_grad_g_spatial_factor(const GaugePolynomial& g, std::span<const complex> z,
                                         std::span<const complex> dz) {
    detail::check_dim(z.size(), g.n_components());
    detail::check_dim(dz.size(), g.n_components());
    std::array<complex, kMaxComponents> f{};
    g.apply_F(z.data(), f.data());
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) s += (f[j] * std::conj(dz[j])).real();
    return 4.0 * s;
}

// ---------------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------------

namespace presets {

inline std::vector<int> unit_multi(int n, int i, int j) {
    std::vector<int> e(n, 0);
    e[i] += 1;
    e[j] += 1;
    return e;
}

/// Manakov / vector NLS: g = (sum_j |z_j|^2)^2, so F_j = z_j sum_k |z_k|^2.
inline GaugePolynomial manakov(int n) {
    GaugePolynomial g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const auto e = unit_multi(n, i, j);
            g.add_term({e, e}, i == j ? 1.0 : 2.0);
        }
    return g;
}

/// Spin-1 condensate (N = 3):
/// g = a S^2 + b((|z1|^2-|z3|^2)^2 + 2|z2|^2(|z1|^2+|z3|^2) + 4 Re(conj(z1) z2^2 conj(z3))),
/// S = |z1|^2 + |z2|^2 + |z3|^2.
inline GaugePolynomial spinor(double a, double b) {
    GaugePolynomial g(3);
    auto diag = [](int i, int j) {
        auto e = unit_multi(3, i, j);
        return MultiIndexPair{e, e};
    };
    g.add_term(diag(0, 0), a + b);
    g.add_term(diag(1, 1), a);
    g.add_term(diag(2, 2), a + b);
    g.add_term(diag(0, 1), 2.0 * a + 2.0 * b);
    g.add_term(diag(1, 2), 2.0 * a + 2.0 * b);
    g.add_term(diag(0, 2), 2.0 * a - 2.0 * b);
    // 4 Re(conj(z1) z2^2 conj(z3)) = 2 z2^2 conj(z1 z3) + mirror
    g.add_term({unit_multi(3, 1, 1), unit_multi(3, 0, 2)}, 2.0 * b);
    return g;
}

} // namespace presets

// ---------------------------------------------------------------------------------
// Structural identity checks
// ---------------------------------------------------------------------------------

struct IdentityReport {
    std::string name;
    int trials = 0;
    double max_deviation = 0.0;  ///< largest raw deviation seen
    double max_ratio = 0.0;      ///< largest deviation / allowed tolerance
    bool passed = true;
};

namespace detail {

inline ComplexVector random_point(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> radius(0.1, 3.0);
    ComplexVector z(n);
    double norm2 = 0.0;
    for (auto& v : z) {
        v = {normal(rng), normal(rng)};
        norm2 += std::norm(v);
    }
    const double r = radius(rng) / std::sqrt(norm2);
    for (auto& v : z) v *= r;
    return z;
}

inline double norm2(std::span<const complex> z) {
    double s = 0.0;
    for (const auto& v : z) s += std::norm(v);
    return s;
}

inline void record(IdentityReport& rep, double deviation, double tolerance) {
    rep.max_deviation = std::max(rep.max_deviation, deviation);
    const double ratio = deviation / tolerance;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (!(ratio <= 1.0)) rep.passed = false;
}

} // namespace detail

/// max |g(e^{i theta} z) - g(z)| over random samples; tolerance 1e-10 (1 + |g(z)|).
inline IdentityReport check_gauge_invariance(const GaugePolynomial& g, int trials, std::uint64_t seed) {
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    IdentityReport rep{"gauge_invariance", trials};
    for (int t = 0; t < trials; ++t) {
        auto z = detail::random_point(rng, g.n_components());
        const double g0 = eval_g(g, z);
        const complex phase = std::polar(1.0, angle(rng));
        for (auto& v : z) v *= phase;
        detail::record(rep, std::abs(eval_g(g, z) - g0), 1e-10 * (1.0 + std::abs(g0)));
    }
    return rep;
}

/// max |sum_j Im(F_j(z) conj(z_j))| over random samples; tolerance 1e-10 (1 + |z|^4).
inline IdentityReport check_charge_identity(const GaugePolynomial& g, int trials, std::uint64_t seed) {
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    std::mt19937_64 rng(seed);
    IdentityReport rep{"charge_identity", trials};
    for (int t = 0; t < trials; ++t) {
        const auto z = detail::random_point(rng, g.n_components());
        const auto f = eval_F(g, z);
        double s = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) s += (f[j] * std::conj(z[j])).imag();
        const double r2 = detail::norm2(z);
        detail::record(rep, std::abs(s), 1e-10 * (1.0 + r2 * r2));
    }
    return rep;
}

/// Euler identity sum_j Re(F_j(z) conj(z_j)) = g(z); tolerance 1e-10 (1 + |z|^4).
inline IdentityReport check_euler_identity(const GaugePolynomial& g, int trials, std::uint64_t seed) {
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    std::mt19937_64 rng(seed);
    IdentityReport rep{"euler_identity", trials};
    for (int t = 0; t < trials; ++t) {
        const auto z = detail::random_point(rng, g.n_components());
        const auto f = eval_F(g, z);
        double s = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) s += (f[j] * std::conj(z[j])).real();
        const double r2 = detail::norm2(z);
        detail::record(rep, std::abs(s - eval_g(g, z)), 1e-10 * (1.0 + r2 * r2));
    }
    return rep;
}

/// F against a finite-difference Wirtinger derivative of g: F_j = (1/4)(dg/dx_j + i dg/dy_j).
/// Each partial is the Richardson combination (4 D(h/2) - D(h)) / 3 of central differences, which is
/// exact for quartics up to rounding; tolerance 1e-10 (|F| + |z|^3).
inline IdentityReport check_wirtinger_fd(const GaugePolynomial& g, int trials, std::uint64_t seed, double h = 0.1) {
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    std::mt19937_64 rng(seed);
    IdentityReport rep{"wirtinger_fd", trials};
    const int n = g.n_components();
    for (int t = 0; t < trials; ++t) {
        const auto z = detail::random_point(rng, n);
        const auto f = eval_F(g, z);
        const double r = std::sqrt(detail::norm2(z));
        const double step = h * r;
        auto central = [&](int j, complex dir, double s) {
            auto zp = z, zm = z;
            zp[j] += s * dir;
            zm[j] -= s * dir;
            return (eval_g(g, zp) - eval_g(g, zm)) / (2.0 * s);
        };
        auto partial = [&](int j, complex dir) { return (4.0 * central(j, dir, 0.5 * step) - central(j, dir, step)) / 3.0; };
        double dev = 0.0, fnorm = 0.0;
        for (int j = 0; j < n; ++j) {
            const complex fd = 0.25 * complex(partial(j, 1.0), partial(j, complex(0.0, 1.0)));
            dev = std::max(dev, std::abs(fd - f[j]));
            fnorm = std::max(fnorm, std::abs(f[j]));
        }
        detail::record(rep, dev, 1e-10 * (fnorm + r * r * r));
    }
    return rep;
}

} // namespace gnls
