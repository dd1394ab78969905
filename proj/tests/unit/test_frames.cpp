#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dirstat/frames.hpp"
#include "dirstat/uniformity.hpp"
#include "oracles.hpp"

namespace dirstat {
namespace {

constexpr double kPi = std::numbers::pi;

UnitVector e(int d, int axis) { return UnitVector::basis(d, axis); }

std::vector<UnitVector> equiangular() { return SampleSet::from_angles({0.0, kPi / 3, 2 * kPi / 3}).to_vectors(); }

DiscreteMeasure counting(const std::vector<UnitVector>& v) { return DiscreteMeasure::counting(SampleSet(v)); }

DiscreteMeasure random_measure(std::uint64_t seed) {
    Xoshiro256 rng(seed);
    const int d = 2 + static_cast<int>(rng() % 5);
    const auto n = static_cast<Eigen::Index>(1 + rng() % 200);
    Matrix pts(d, n);
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        pts.col(i) = uniform_on_sphere(rng, d);
        w[i] = rng.uniform() + 1e-3;
    }
    return DiscreteMeasure::normalized(SampleSet::from_columns(pts), w);
}

// Frame potential through the second-moment matrix, an O(n d^2) route.
double moment_route_potential(const DiscreteMeasure& mu) {
    Matrix m = Matrix::Zero(mu.dim(), mu.dim());
    for (std::size_t i = 0; i < mu.size(); ++i)
        m += mu.weights()[static_cast<Eigen::Index>(i)] * mu.atoms().point(i) * mu.atoms().point(i).transpose();
    return m.squaredNorm();
}

TEST(FrameBounds, Examples) {
    auto b = frame_bounds(std::vector<UnitVector>{e(2, 0), e(2, 1)});
    EXPECT_DOUBLE_EQ(b.lower, 1.0);
    EXPECT_DOUBLE_EQ(b.upper, 1.0);
    EXPECT_TRUE(b.is_tight());

    b = frame_bounds(std::vector<UnitVector>{e(2, 0)});
    EXPECT_NEAR(b.lower, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(b.upper, 1.0);
    EXPECT_FALSE(b.is_frame());

    b = frame_bounds(equiangular());
    EXPECT_NEAR(b.lower, 1.5, 1e-12);
    EXPECT_NEAR(b.upper, 1.5, 1e-12);
}

TEST(FrameBounds, GeneralDimension) {
    // Two copies of an orthonormal basis of R^5 plus e1: bounds 2 and 3.
    std::vector<UnitVector> v;
    for (int rep = 0; rep < 2; ++rep)
        for (int k = 0; k < 5; ++k) v.push_back(e(5, k));
    v.push_back(e(5, 0));
    const auto b = frame_bounds(v);
    EXPECT_NEAR(b.lower, 2.0, 1e-12);
    EXPECT_NEAR(b.upper, 3.0, 1e-12);
    EXPECT_FALSE(b.is_tight());
}

TEST(IsFntf, Examples) {
    EXPECT_TRUE(is_fntf(std::vector<UnitVector>{e(2, 0), e(2, 1)}, 1e-12));
    EXPECT_FALSE(is_fntf(std::vector<UnitVector>{e(2, 0), e(2, 0)}, 1e-12));
    EXPECT_TRUE(is_fntf(harmonic_fntf_r2(5), 1e-12));
    EXPECT_LT(fntf_defect_r2(harmonic_angles_r2(5)), 1e-13);
    EXPECT_THROW(is_fntf(harmonic_fntf_r2(5), 0.0), DomainError);
}

TEST(Harmonic, Examples) {
    const auto two = harmonic_angles_r2(2);
    EXPECT_EQ(two, (std::vector<double>{0.0, kPi / 2}));
    const auto three = harmonic_angles_r2(3);
    EXPECT_EQ(three, (std::vector<double>{0.0, kPi / 3, 2 * kPi / 3}));
    EXPECT_LT(fntf_defect_r2(harmonic_angles_r2(4)), 1e-15);
    EXPECT_THROW(harmonic_fntf_r2(1), DomainError);
}

TEST(Harmonic, TightForAllSizes) {
    for (int n = 2; n <= 1000; ++n) ASSERT_TRUE(is_fntf(harmonic_fntf_r2(n), 1e-10)) << n;
}

TEST(FntfDefect, Examples) {
    const std::vector<double> ortho{0.0, kPi / 2};
    const std::vector<double> eighth{0.0, kPi / 4};
    const std::vector<double> tri{0.0, kPi / 3, 2 * kPi / 3};
    EXPECT_NEAR(fntf_defect_r2(ortho), 0.0, 1e-15);
    EXPECT_NEAR(fntf_defect_r2(eighth), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(fntf_defect_r2(tri), 0.0, 1e-15);
}

TEST(FramePotential, Examples) {
    EXPECT_EQ(frame_potential(counting({e(2, 0)})), 1.0);
    EXPECT_EQ(frame_potential(counting({e(2, 0), e(2, 1)})), 0.5);
    EXPECT_NEAR(frame_potential(counting(equiangular())), 0.5, 1e-15);
}

TEST(RieszPotential, Examples) {
    EXPECT_EQ(riesz_potential(counting({e(2, 0)})), 0.0);
    EXPECT_EQ(riesz_potential(counting({e(2, 0), -e(2, 0)})), 2.0);
    EXPECT_NEAR(riesz_potential(counting({e(2, 0), e(2, 1)})), 1.0, 1e-15);
}

TEST(FractionalPotential, Examples) {
    EXPECT_DOUBLE_EQ(fractional_potential(counting({e(2, 0), -e(2, 0)})), 0.5);
    // The zero-mean representative of the equiangular tri-direction.
    const auto zero_mean = SampleSet::from_angles({0.0, 2 * kPi / 3, 4 * kPi / 3});
    EXPECT_NEAR(fractional_potential(DiscreteMeasure::counting(zero_mean)), 0.25, 1e-15);
    // Same axes, mean of norm 2/3: Riesz = 2 - 8/9.
    EXPECT_NEAR(fractional_potential(counting(equiangular())), 0.5 / (10.0 / 9.0), 1e-15);
    EXPECT_THROW(fractional_potential(counting({e(2, 0)})), DomainError);
    EXPECT_THROW(fractional_potential(counting({e(3, 1), e(3, 1)})), DomainError);
    EXPECT_FALSE(potential_report(counting({e(2, 0)})).fractional.has_value());
}

TEST(DirectionalForce, Examples) {
    EXPECT_EQ(directional_force(e(2, 0), e(2, 0)), Vector::Zero(2));
    EXPECT_EQ(directional_force(e(2, 0), e(2, 1)), Vector::Zero(2));
    const auto f = directional_force(e(2, 0), UnitVector::from_angle(kPi / 4));
    EXPECT_NEAR(f[0], std::sqrt(2.0) * (1.0 - std::sqrt(2.0) / 2.0), 1e-15);
    EXPECT_NEAR(f[0], 0.4142136, 1e-7);
    EXPECT_NEAR(f[1], -1.0, 1e-15);
}

TEST(PotentialIdentities, RandomMeasures) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto mu = random_measure(seed);
        const double d = mu.dim();
        const double pfp = frame_potential(mu);
        EXPECT_NEAR(pfp, moment_route_potential(mu), 1e-12);
        EXPECT_GE(pfp, 1.0 / d - 1e-15);
        EXPECT_LE(pfp, 1.0 + 1e-12);
        const double dev = moment_deviation(mu);
        EXPECT_NEAR(pfp - 1.0 / d, dev * dev, 1e-12);
        const double mean2 = measure_moments(mu).mean.squaredNorm();
        const double riesz = riesz_potential(mu);
        EXPECT_NEAR(riesz, 2.0 - 2.0 * mean2, 1e-12);
        EXPECT_GE(riesz, -1e-15);
        EXPECT_LE(riesz, 2.0 + 1e-12);
    }
}

TEST(PotentialIdentities, RayleighAlternativeIffRieszMaximum) {
    // Antipodal pairs: zero mean.
    const auto s = sample_uniform(30, 3, 12);
    Matrix sym(3, 60);
    sym << s.points(), -s.points();
    const auto pairs = SampleSet::from_columns(sym);
    EXPECT_NEAR(riesz_potential(DiscreteMeasure::counting(pairs)), 2.0, 1e-10);
    EXPECT_NEAR(rayleigh_test(pairs).statistic, 0.0, 1e-10);
    // Generic sample: neither.
    EXPECT_LT(riesz_potential(DiscreteMeasure::counting(s)), 2.0 - 1e-6);
    EXPECT_GT(rayleigh_test(s).statistic, 1e-6);
}

TEST(PotentialIdentities, BinghamBridge) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int d = 2 + static_cast<int>(seed % 3);
        const auto s = sample_uniform(5 + seed, d, 1000 + seed);
        const double n = static_cast<double>(s.size());
        const double lhs = frame_potential(DiscreteMeasure::counting(s)) - 1.0 / d;
        const double rhs = 2.0 / (d * (d + 2.0) * n) * bingham_test(s).statistic;
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(PotentialIdentities, ZeroMeanFntfFractional) {
    for (int n = 2; n <= 12; ++n) {
        auto frame = harmonic_fntf_r2(n);
        std::vector<UnitVector> sym = frame;
        for (const auto& v : frame) sym.push_back(-v);
        EXPECT_NEAR(fractional_potential(counting(sym)), 0.25, 1e-12) << n;
    }
    // Orthonormal basis with antipodes in R^3.
    std::vector<UnitVector> octa;
    for (int k = 0; k < 3; ++k) {
        octa.push_back(e(3, k));
        octa.push_back(-e(3, k));
    }
    EXPECT_NEAR(fractional_potential(counting(octa)), 1.0 / 6.0, 1e-12);
}

TEST(GradientTighten, FixedPointIsUnchanged) {
    const auto frame = harmonic_fntf_r2(3);
    const auto r = gradient_tighten(frame, {.tol = 1e-12});
    ASSERT_EQ(r.trace.size(), 1u);
    EXPECT_NEAR(r.trace.front(), 0.5, 1e-15);
    EXPECT_EQ(r.steps, 0);
    EXPECT_TRUE(r.converged);
    for (std::size_t i = 0; i < frame.size(); ++i) EXPECT_EQ(r.vectors[i].coords(), frame[i].coords());
    EXPECT_LT(r.max_tangential_force, 1e-12);
}

TEST(GradientTighten, TwoVectorsBecomeOrthogonal) {
    const auto r = gradient_tighten(std::vector<UnitVector>{UnitVector::from_angle(0.0), UnitVector::from_angle(0.1)},
                                    {.max_steps = 100000, .tol = 1e-15});
    std::vector<double> angles;
    for (const auto& v : r.vectors) angles.push_back(std::atan2(v[1], v[0]));
    EXPECT_LT(fntf_defect_r2(angles), 1e-6);
    EXPECT_NEAR(std::abs(r.vectors[0].dot(r.vectors[1])), 0.0, 1e-6);
}

TEST(GradientTighten, RandomR3ConvergesMonotonically) {
    const auto start = sample_uniform(7, 3, 2718).to_vectors();
    const auto r = gradient_tighten(start, {.tol = 1e-9});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(frame_potential(counting(r.vectors)), 1.0 / 3.0, 1e-8);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
    EXPECT_TRUE(is_fntf(r.vectors, 1e-4));
}

TEST(GradientTighten, IdenticalVectorsEscapeSaddle) {
    // All four vectors identical except one spanning direction: a symmetric
    // configuration where the tie-break perturbation is exercised.
    std::vector<UnitVector> v{e(2, 0), e(2, 0), e(2, 1), e(2, 1)};
    auto r = gradient_tighten(v, {.tol = 1e-12});
    EXPECT_TRUE(r.converged);
    std::vector<UnitVector> w{e(2, 0), e(2, 0), e(2, 0), e(2, 1)};
    r = gradient_tighten(w, {.tol = 1e-12});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(frame_potential(counting(r.vectors)), 0.5, 1e-12);
}

TEST(GradientTighten, Errors) {
    EXPECT_THROW(gradient_tighten(std::vector<UnitVector>{e(3, 0), e(3, 1), e(3, 0)}), DomainError);
    EXPECT_THROW(gradient_tighten(std::vector<UnitVector>{e(3, 0), e(3, 1)}), DomainError);
    EXPECT_THROW(gradient_tighten(harmonic_fntf_r2(3), {.step_size = 0.0}), DomainError);
}

TEST(GradientTighten, ReportsNonConvergence) {
    const auto start = sample_uniform(9, 3, 5).to_vectors();
    const auto r = gradient_tighten(start, {.max_steps = 2, .tol = 1e-14});
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.steps, 2);
}

}  // namespace
}  // namespace dirstat
