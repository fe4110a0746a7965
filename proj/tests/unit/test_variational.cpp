#include "gnls/functionals.hpp"
#include "gnls/profile.hpp"
#include "gnls/sphere.hpp"
#include "gnls/variational.hpp"

#include <fftw3.h>
#include <gtest/gtest.h>

#include <random>

using namespace gnls;

namespace {

const RadialProfile& Q() {
    static const RadialProfile q = solve_scalar_Q();
    return q;
}

// Radial fixed point for v = r Q on (0, Rmax) with Dirichlet ends, expanded in sine modes:
// (k^2 + 1) v_hat = (v^3 / r^2)_hat, iterated with the Petviashvili stabilising factor.
double q0_sine_oracle(double r_max = 30.0, int m = 4095) {
    std::vector<double> r(m), k(m), v(m), a(m), nl(m), nh(m);
    for (int i = 0; i < m; ++i) {
        r[i] = (i + 1) * r_max / (m + 1);
        k[i] = M_PI * (i + 1) / r_max;
        v[i] = 4.3 * r[i] * std::exp(-0.5 * r[i] * r[i]);
    }
    fftw_plan fv = fftw_plan_r2r_1d(m, v.data(), a.data(), FFTW_RODFT00, FFTW_ESTIMATE);
    fftw_plan fn = fftw_plan_r2r_1d(m, nl.data(), nh.data(), FFTW_RODFT00, FFTW_ESTIMATE);
    fftw_plan back = fftw_plan_r2r_1d(m, nh.data(), v.data(), FFTW_RODFT00, FFTW_ESTIMATE);
    for (int it = 0; it < 1000; ++it) {
        for (int i = 0; i < m; ++i) nl[i] = v[i] * v[i] * v[i] / (r[i] * r[i]);
        fftw_execute(fv);
        fftw_execute(fn);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < m; ++i) {
            num += (k[i] * k[i] + 1.0) * a[i] * a[i];
            den += nh[i] * a[i];
        }
        const double s = std::pow(num / den, 1.5);
        const std::vector<double> old = v;
        for (int i = 0; i < m; ++i) nh[i] *= s / (k[i] * k[i] + 1.0) / (2.0 * (m + 1));
        fftw_execute(back);
        double d = 0.0;
        for (int i = 0; i < m; ++i) d = std::max(d, std::abs(v[i] - old[i]));
        if (d < 1e-14) break;
    }
    fftw_execute(fv);
    double q0 = 0.0;  // v'(0) = sum b_k k_k with b = a / (m + 1)
    for (int i = 0; i < m; ++i) q0 += a[i] / (m + 1) * k[i];
    fftw_destroy_plan(fv);
    fftw_destroy_plan(fn);
    fftw_destroy_plan(back);
    return q0;
}

FieldState gaussian(const GridDescriptor& grid, double amp, double width) {
    FieldState u(grid);
    const int n = grid.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const double x = grid.coordinate(i), y = grid.coordinate(j), z = grid.coordinate(l);
                u.data[grid.index(i, j, l)] = amp * std::exp(-(x * x + y * y + z * z) / (2 * width * width));
            }
    return u;
}

} // namespace

TEST(Profile, ShootingAgreesWithSineSeriesFixedPoint) {
    const double oracle = q0_sine_oracle();
    EXPECT_NEAR(Q().q0 / oracle, 1.0, 1e-6) << Q().q0 << " vs " << oracle;
}

TEST(Profile, PohozaevRatios) {
    EXPECT_NEAR(Q().int_grad2 / Q().int_q2, 3.0, 1e-5);
    EXPECT_NEAR(Q().int_q4 / Q().int_q2, 4.0, 1e-5);
}

TEST(Profile, PositiveDecreasingAndSmoothTail) {
    for (std::size_t i = 1; i < Q().q.size(); ++i) {
        ASSERT_GT(Q().q[i], 0.0);
        ASSERT_LE(Q().q[i], Q().q[i - 1]);
    }
    const double r = Q().match_radius;
    EXPECT_NEAR(Q().value(r - 1e-9), Q().value(r + 1e-9), 1e-8 * Q().value(r));
    EXPECT_NEAR(Q().value(0.0), Q().q0, 1e-14);
    EXPECT_NEAR(Q().derivative(0.0), 0.0, 1e-12);
}

TEST(Profile, SatisfiesTheRadialEquation) {
    // -Q'' - 2Q'/r + Q - Q^3 = 0 checked by differences of the interpolant at a few radii
    for (double r : {0.5, 1.0, 2.0, 4.0, 7.0}) {
        const double h = 1e-3;
        const double d2 = (Q().value(r + h) - 2 * Q().value(r) + Q().value(r - h)) / (h * h);
        const double q = Q().value(r);
        EXPECT_NEAR(-d2 - 2.0 * Q().derivative(r) / r + q - q * q * q, 0.0, 1e-5 * Q().q0);
    }
}

TEST(GroundState, KineticVirialVanishesOnFineGrid) {
    const GridDescriptor grid{64, 16.0, 2};
    const auto g = presets::manakov(2);
    const GroundStateSpec spec{1.0, 1.0, {complex(1.0 / std::sqrt(2.0)), complex(0.0, 1.0 / std::sqrt(2.0))}, {}};
    spec.validate(g);
    const auto u = build_ground_state(spec, Q(), grid, 1e-4);
    const auto r = functionals(u, g);
    EXPECT_LE(std::abs(r.K), 1e-3 * r.H);
    EXPECT_NEAR(r.M, 0.5 * Q().int_q2, 1e-3 * r.M);

    const auto refined = refine_ground_state(spec, Q(), grid, {}, 1e-4);
    EXPECT_LE(refined.residual, 1e-10);
    const auto rr = functionals(refined.field, g);
    EXPECT_LE(std::abs(rr.K), 1e-3 * rr.H);
}

TEST(GroundState, ScalingInOmegaAndGmax) {
    // Q_{omega, g_max}: M scales as omega^{-1/2} / g_max
    const GridDescriptor grid{64, 24.0, 1};
    const auto g = presets::manakov(1).scaled(2.0);
    const auto u = build_ground_state({0.5, 2.0, {complex(1.0)}, {}}, Q(), grid, 1e-3);
    const auto r = functionals(u, g);
    EXPECT_NEAR(r.M, 0.5 * Q().int_q2 / (std::sqrt(0.5) * 2.0), 1e-4 * r.M);
}

TEST(GroundState, TinyBoxIsRejected) {
    const GridDescriptor grid{32, 4.0, 1};
    EXPECT_THROW(build_ground_state({1.0, 1.0, {complex(1.0)}, {}}, Q(), grid), TruncationError);
}

TEST(GroundState, DirectionMustMaximise) {
    const auto g = presets::spinor(1.0, 0.5);
    const GroundStateSpec bad{1.0, 1.5, {complex(0.0), complex(1.0), complex(0.0)}, {}};
    EXPECT_THROW(bad.validate(g), ValidationError);
    const GroundStateSpec good{1.0, 1.5, {complex(1.0), complex(0.0), complex(0.0)}, {}};
    EXPECT_NO_THROW(good.validate(g));
}

TEST(Sphere, ManakovMaximumIsOne) {
    for (int n : {1, 2, 3}) {
        const auto m = maximize_g_on_sphere(presets::manakov(n));
        EXPECT_NEAR(m.g_max, 1.0, 1e-10);
        for (const auto& w : m.maximizers) EXPECT_LE(sphere_stationarity(presets::manakov(n), w, m.g_max), 1e-6);
    }
}

TEST(Sphere, SpinorAgainstSampling) {
    const auto g = presets::spinor(1.0, 0.5);
    const auto m = maximize_g_on_sphere(g);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> d;
    double best = -1e300;
    ComplexVector z(3);
    for (int s = 0; s < 1000000; ++s) {
        double n2 = 0.0;
        for (auto& v : z) {
            v = {d(rng), d(rng)};
            n2 += std::norm(v);
        }
        for (auto& v : z) v /= std::sqrt(n2);
        best = std::max(best, g.eval_raw(z.data()));
    }
    EXPECT_NEAR(m.g_max, best, 1e-4);
    EXPECT_GE(m.g_max, best - 1e-12);
    EXPECT_FALSE(m.maximizers.empty());
    for (const auto& w : m.maximizers) EXPECT_LE(sphere_stationarity(g, w, m.g_max), 1e-6);
}

TEST(Sphere, NonfocusingIsRejected) {
    EXPECT_THROW(maximize_g_on_sphere(presets::manakov(2).scaled(-1.0)), NonfocusingError);
}

TEST(Thresholds, ClosedFormAndScaling) {
    const auto t = thresholds(Q(), 1.0);
    const double m = Q().int_q2;
    EXPECT_NEAR(t.me_threshold / (m * m / 4.0), 1.0, 1e-6);
    EXPECT_NEAR(t.mg_threshold / (std::sqrt(3.0) * m), 1.0, 1e-5);
    for (double c : {0.5, 2.0, 5.0}) {
        const auto sphere = maximize_g_on_sphere(presets::manakov(2).scaled(c));
        const auto tc = thresholds(Q(), sphere.g_max);
        EXPECT_NEAR(tc.me_threshold * c * c / t.me_threshold, 1.0, 1e-10);
    }
    EXPECT_THROW(thresholds(Q(), 0.0), NonfocusingError);
}

TEST(Classify, GaussianFamilyVerdicts) {
    const GridDescriptor grid{32, 16.0, 2};
    const auto g = presets::manakov(2);
    const auto thr = thresholds(Q(), 1.0);
    EXPECT_EQ(classify(gaussian(grid, 1.0, 1.0), g, thr).verdict, DichotomyVerdict::ScatterRegion);
    EXPECT_EQ(classify(gaussian(grid, 2.2, 1.0), g, thr).verdict, DichotomyVerdict::AboveThreshold);
    const auto strong = classify(gaussian(grid, 3.2, 1.0), g, thr);
    EXPECT_EQ(strong.verdict, DichotomyVerdict::BlowupRegion);
    EXPECT_LT(strong.record.K, 0.0);
    EXPECT_THROW(classify(FieldState(grid), g, thr), ArgumentError);
}

TEST(Classify, SmallDataSatisfiesTheKineticConditions) {
    const GridDescriptor grid{32, 16.0, 2};
    const auto c = classify(gaussian(grid, 0.5, 1.0), presets::manakov(2), thresholds(Q(), 1.0));
    EXPECT_TRUE(c.kinetic_below);
    EXPECT_TRUE(c.gradient_condition);
    EXPECT_GT(c.delta, 0.0);
}

TEST(Classify, GroundStateSitsOnTheBoundary) {
    const GridDescriptor grid{64, 16.0, 2};
    const auto g = presets::manakov(2);
    const GroundStateSpec spec{1.0, 1.0, {complex(1.0), complex(0.0)}, {}};
    const auto u = refine_ground_state(spec, Q(), grid, {}, 1e-4).field;
    EXPECT_EQ(classify(u, g, thresholds(Q(), 1.0)).verdict, DichotomyVerdict::Boundary);
}
