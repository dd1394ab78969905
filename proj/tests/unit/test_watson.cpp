#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dirstat/frames.hpp"
#include "dirstat/uniformity.hpp"
#include "dirstat/watson.hpp"
#include "oracles.hpp"

namespace dirstat {
namespace {

constexpr double kPi = std::numbers::pi;

UnitVector e(int d, int axis) { return UnitVector::basis(d, axis); }

double deg(double rad) { return rad * 180.0 / kPi; }

// CDF of psi = 2 theta mod 2 pi for Watson(e1, kappa) on the circle. The
// doubled angle has density exp((kappa/2) cos psi) / (2 pi I0(kappa/2)),
// integrated term by term from its Fourier series.
double doubled_angle_cdf(double psi, double kappa) {
    const double a = 0.5 * std::abs(kappa);
    const double sign = kappa < 0.0 ? -1.0 : 1.0;
    const double i0 = std::cyl_bessel_i(0.0, a);
    double s = psi;
    double parity = 1.0;
    for (int k = 1; k <= 80; ++k) {
        parity *= sign;
        s += 2.0 * parity * std::cyl_bessel_i(static_cast<double>(k), a) / i0 * std::sin(k * psi) / k;
    }
    return s / (2.0 * kPi);
}

std::vector<Eigen::VectorXd> coords(const std::vector<UnitVector>& v) {
    std::vector<Eigen::VectorXd> out;
    for (const auto& u : v) out.push_back(u.coords());
    return out;
}

TEST(WatsonNormalizer, Examples) {
    EXPECT_NEAR(watson_normalizer(0.0, 2), 1.0 / (2.0 * kPi), 1e-15);
    EXPECT_NEAR(watson_normalizer(0.0, 3), 1.0 / (4.0 * kPi), 1e-15);
    const double want = 1.0 / (2.0 * kPi * std::exp(0.5) * std::cyl_bessel_i(0.0, 0.5));
    EXPECT_NEAR(watson_normalizer(1.0, 2), want, 1e-14);
    EXPECT_NEAR(watson_normalizer(1.0, 2), 0.0907699690, 1e-10);
    // Trapezoid oracle for 2 pi M(1/2, 1, 1).
    const double integral = testing::periodic_trapezoid([](double t) { return std::exp(std::cos(t) * std::cos(t)); }, 400);
    EXPECT_NEAR(watson_normalizer(1.0, 2), 1.0 / integral, 1e-14);
}

TEST(WatsonNormalizer, RangeIsPropagated) { EXPECT_THROW(watson_normalizer(600.0, 2), DomainError); }

TEST(WatsonDensity, Examples) {
    const WatsonParams p(e(2, 0), 1.0);
    EXPECT_NEAR(watson_log_density(e(2, 1), p), std::log(watson_normalizer(1.0, 2)), 1e-15);
    EXPECT_NEAR(watson_log_density(e(2, 0), p), std::log(watson_normalizer(1.0, 2)) + 1.0, 1e-14);
    EXPECT_THROW(WatsonParams(e(2, 0), 0.0), DomainError);
    EXPECT_THROW(watson_log_density(e(3, 0), p), DataError);
}

TEST(WatsonDensity, AntipodalSymmetryIsExact) {
    Xoshiro256 rng(4);
    for (int d : {2, 3, 5})
        for (int trial = 0; trial < 200; ++trial) {
            const WatsonParams p(UnitVector::normalized(uniform_on_sphere(rng, d)), 40.0 * rng.uniform() - 20.0 + 1e-3);
            const auto x = UnitVector::normalized(uniform_on_sphere(rng, d));
            EXPECT_EQ(watson_log_density(x, p), watson_log_density(-x, p));
        }
}

TEST(WatsonDensity, IntegratesToOneOnCircle) {
    for (double kappa : {-20.0, -5.0, -1.0, 1.0, 5.0, 20.0}) {
        const WatsonParams p(UnitVector::from_angle(0.7), kappa);
        const double total = testing::periodic_trapezoid(
            [&](double t) { return std::exp(watson_log_density(UnitVector::from_angle(t), p)); }, 4000);
        EXPECT_NEAR(total, 1.0, 1e-8) << kappa;
    }
}

TEST(WatsonDensity, IntegratesToOneOnSphere) {
    // Axisymmetric about the director e3: area element 2 pi du.
    for (double kappa : {-20.0, -5.0, -1.0, 1.0, 5.0, 20.0}) {
        const WatsonParams p(e(3, 2), kappa);
        const double total = 2.0 * kPi * testing::simpson(
                                             [&](double u) {
                                                 Vector x(3);
                                                 x << std::sqrt(std::max(0.0, 1.0 - u * u)), 0.0, u;
                                                 return std::exp(watson_log_density(UnitVector::normalized(x), p));
                                             },
                                             -1.0, 1.0, 20000);
        EXPECT_NEAR(total, 1.0, 1e-7) << kappa;
    }
}

TEST(WatsonMeanSq, MatchesFiniteDifferences) {
    for (int d : {2, 3})
        for (double kappa = -50.0; kappa <= 50.0; kappa += 0.5) {
            const double h = 1e-4;
            const double fd = (log_kummer_m(0.5, 0.5 * d, kappa + h) - log_kummer_m(0.5, 0.5 * d, kappa - h)) / (2 * h);
            EXPECT_NEAR(watson_mean_sq(kappa, d), fd, 1e-7) << d << " " << kappa;
        }
    EXPECT_NEAR(watson_mean_sq(0.0, 2), 0.5, 1e-15);
    EXPECT_NEAR(watson_mean_sq(0.0, 3), 1.0 / 3.0, 1e-15);
}

TEST(SampleWatson, ConcentratedBipolar) {
    const auto s = sample_watson(WatsonParams(e(2, 0), 200.0), 10000, 1);
    EXPECT_GE(s.points().row(0).array().square().mean(), 0.99);
    const auto s3 = sample_watson(WatsonParams(e(3, 0), 200.0), 10000, 1);
    EXPECT_GE(s3.points().row(0).array().square().mean(), 0.99);
}

TEST(SampleWatson, Girdle) {
    const auto s = sample_watson(WatsonParams(e(2, 0), -50.0), 10000, 2);
    EXPECT_LE(s.points().row(0).array().square().mean(), 0.02);
}

TEST(SampleWatson, ScatterMatchesQuadrature) {
    for (int d : {2, 3}) {
        Vector z = Vector::Ones(d);
        const WatsonParams p(UnitVector::normalized(z), 5.0);
        const auto s = sample_watson(p, 100000, 17);
        const Matrix want = mixture_second_moments(WatsonMixture({p.director()}, 5.0));
        EXPECT_LT((moment_summary(s).scatter - want).norm(), 0.01) << d;
    }
}

TEST(SampleWatson, DoubledAnglesPassKs) {
    for (double kappa : {-5.0, 5.0}) {
        const auto s = sample_watson(WatsonParams(e(2, 0), kappa), 10000, 2718);
        std::vector<double> psi;
        for (std::size_t i = 0; i < s.size(); ++i) psi.push_back(detail::wrap_two_pi(2.0 * std::atan2(s.point(i)[1], s.point(i)[0])));
        const double dstat = testing::ks_statistic(psi, [&](double v) { return doubled_angle_cdf(v, kappa); });
        EXPECT_GT(testing::ks_pvalue(dstat, psi.size()), 0.01) << kappa;
    }
}

TEST(SampleWatson, DeterministicAndThreadIndependent) {
    const WatsonParams p(UnitVector::from_angle(1.0), 3.0);
    EXPECT_EQ(sample_watson(p, 2000, 9).points(), sample_watson(p, 2000, 9).points());
    EXPECT_EQ(sample_watson(p, 2000, 9, 1).points(), sample_watson(p, 2000, 9, 4).points());
    EXPECT_NE(sample_watson(p, 2000, 9).points(), sample_watson(p, 2000, 10).points());
}

TEST(SampleWatson, Preconditions) {
    EXPECT_THROW(sample_watson(WatsonParams(e(4, 0), 1.0), 10, 1), DomainError);
    EXPECT_THROW(sample_watson(WatsonParams(e(2, 0), 1.0), 0, 1), DomainError);
}

TEST(SampleMixture, SingleComponentEqualsSampleWatson) {
    const auto z = UnitVector::from_angle(0.3);
    EXPECT_EQ(sample_mixture(WatsonMixture({z}, 7.0), 3000, 5).points(),
              sample_watson(WatsonParams(z, 7.0), 3000, 5).points());
}

TEST(SampleMixture, ThreadIndependent) {
    const WatsonMixture mix(harmonic_fntf_r2(3), 10.0);
    EXPECT_EQ(sample_mixture(mix, 5000, 3, 1).points(), sample_mixture(mix, 5000, 3, 3).points());
}

TEST(SampleMixture, FntfDirectorsAreBinghamBlind) {
    const WatsonMixture mix(harmonic_fntf_r2(3), 10.0);
    double mean = 0.0;
    const int seeds = 40;
    for (int seed = 0; seed < seeds; ++seed) mean += bingham_test(sample_mixture(mix, 10000, seed)).statistic;
    mean /= seeds;
    EXPECT_GT(mean, 1.3);
    EXPECT_LT(mean, 2.7);
}

TEST(SampleMixture, SingleDirectorIsDetected) {
    int rejects = 0;
    for (int seed = 0; seed < 200; ++seed)
        rejects += bingham_test(sample_watson(WatsonParams(e(2, 0), 10.0), 100, seed)).rejects(0.01) ? 1 : 0;
    EXPECT_GE(rejects, 198);
}

TEST(SampleMixture, WeightsSelectComponents) {
    const WatsonMixture mix({e(2, 0), e(2, 1)}, {50.0}, {0.8, 0.2});
    const auto s = sample_mixture(mix, 20000, 8);
    const double near_e1 = (s.points().row(0).array().abs() > s.points().row(1).array().abs()).cast<double>().mean();
    EXPECT_NEAR(near_e1, 0.8, 0.02);
}

TEST(WatsonMixture, Validation) {
    EXPECT_THROW(WatsonMixture({}, 1.0), DataError);
    EXPECT_THROW(WatsonMixture({e(2, 0), e(3, 0)}, 1.0), DataError);
    EXPECT_THROW(WatsonMixture({e(2, 0), e(2, 1)}, {1.0}, {0.7, 0.2}), DataError);
    EXPECT_THROW(WatsonMixture({e(2, 0), e(2, 1)}, {1.0, 2.0, 3.0}, {}), DataError);
    EXPECT_THROW(WatsonMixture({e(2, 0)}, 0.0), DomainError);
    const WatsonMixture m({e(2, 0), e(2, 1)}, 2.0);
    EXPECT_TRUE(m.shared_kappa());
    EXPECT_EQ(m.weights(), (std::vector<double>{0.5, 0.5}));
}

TEST(MixtureSecondMoments, FntfDirectorsGiveTightFrame) {
    for (int n = 2; n <= 5; ++n)
        for (double kappa : {-5.0, 1.0, 10.0}) {
            const Matrix m = mixture_second_moments(WatsonMixture(harmonic_fntf_r2(n), kappa));
            EXPECT_LT((m - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-8) << n << " " << kappa;
        }
}

TEST(MixtureSecondMoments, Examples) {
    for (double kappa : {-1e-6, 1e-6}) {
        const Matrix m = mixture_second_moments(WatsonMixture({e(2, 0)}, kappa));
        EXPECT_LT((m - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-5);
    }
    EXPECT_GE(mixture_second_moments(WatsonMixture({e(2, 0)}, 200.0))(0, 0), 0.99);
}

TEST(MixtureSecondMoments, QuadratureMatchesClosedForm) {
    Xoshiro256 rng(12);
    for (int d : {2, 3})
        for (double kappa : {-20.0, -3.0, 0.5, 4.0, 30.0}) {
            const WatsonParams p(UnitVector::normalized(uniform_on_sphere(rng, d)), kappa);
            const Matrix quad = mixture_second_moments(WatsonMixture({p.director()}, kappa));
            EXPECT_LT((quad - watson_second_moments(p)).cwiseAbs().maxCoeff(), 1e-9) << d << " " << kappa;
        }
}

TEST(MixtureSecondMoments, RotationEquivariant) {
    Xoshiro256 rng(31);
    for (int d : {2, 3}) {
        std::vector<UnitVector> dirs;
        for (int i = 0; i < 3; ++i) dirs.push_back(UnitVector::normalized(uniform_on_sphere(rng, d)));
        const Matrix r = testing::random_rotation(d, rng);
        std::vector<UnitVector> rotated;
        for (const auto& z : dirs) rotated.push_back(UnitVector::normalized(r * z.coords()));
        const WatsonMixture mix(dirs, {2.0, -4.0, 8.0}, {0.2, 0.3, 0.5});
        const WatsonMixture rmix(rotated, {2.0, -4.0, 8.0}, {0.2, 0.3, 0.5});
        const Matrix m = mixture_second_moments(mix);
        EXPECT_LT((mixture_second_moments(rmix) - r * m * r.transpose()).norm(), 1e-9) << d;
    }
}

TEST(ModeWidths, Examples) {
    const auto narrow = mode_widths(WatsonMixture({e(2, 0)}, 400.0));
    const auto wide = mode_widths(WatsonMixture({e(2, 0)}, 100.0));
    ASSERT_TRUE(narrow[0].width && wide[0].width);
    EXPECT_LT(*narrow[0].width, *wide[0].width);
    const auto flat = mode_widths(WatsonMixture({e(2, 0)}, 1e-6));
    EXPECT_NEAR(*flat[0].width, kPi / 4, 1e-6);
    EXPECT_FALSE(mode_widths(WatsonMixture({e(2, 0)}, -3.0))[0].width.has_value());
}

TEST(ModeWidths, MonotoneAndPermutationEquivariant) {
    double prev = kPi;
    for (double kappa = 0.01; kappa <= 500.0; kappa *= 1.3) {
        const double w = *mode_widths(WatsonMixture({e(2, 0)}, kappa))[0].width;
        EXPECT_LT(w, prev);
        prev = w;
    }
    const std::vector<UnitVector> dirs{e(2, 0), UnitVector::from_angle(1.0), e(2, 1)};
    const auto a = mode_widths(WatsonMixture(dirs, {1.0, 5.0, 20.0}, {}));
    const auto b = mode_widths(WatsonMixture({dirs[2], dirs[0], dirs[1]}, {20.0, 1.0, 5.0}, {}));
    EXPECT_EQ(*a[0].width, *b[1].width);
    EXPECT_EQ(*a[1].width, *b[2].width);
    EXPECT_EQ(*a[2].width, *b[0].width);
    EXPECT_EQ(a[1].direction.coords(), b[2].direction.coords());
}

TEST(FitWatsonEm, SingleComponentRecovery) {
    const auto s = sample_watson(WatsonParams(e(2, 0), 20.0), 5000, 77);
    const auto fit = fit_watson_mixture_em(s, {.components = 1, .seed = 1});
    EXPECT_TRUE(fit.converged);
    EXPECT_LT(deg(testing::axial_distance(fit.mixture.directors()[0].coords(), e(2, 0).coords())), 1.0);
    EXPECT_NEAR(fit.mixture.kappa(0), 20.0, 2.0);
    EXPECT_FALSE(fit.degenerate[0]);
    EXPECT_FALSE(fit.near_uniform[0]);
}

TEST(FitWatsonEm, ThreeDirectorRecovery) {
    const std::vector<UnitVector> truth{UnitVector::from_angle(0.0), UnitVector::from_angle(kPi / 3),
                                        UnitVector::from_angle(2 * kPi / 3)};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto s = sample_mixture(WatsonMixture(truth, 20.0), 6000, seed);
        const auto fit = fit_watson_mixture_em(s, {.components = 3, .seed = seed});
        EXPECT_LT(deg(testing::best_matching_max_distance(coords(truth), coords(fit.mixture.directors()))), 2.0) << seed;
        EXPECT_NEAR(fit.mixture.kappa(0), 20.0, 3.0) << seed;
    }
}

TEST(FitWatsonEm, SymmetricSampleIsDegenerate) {
    std::vector<UnitVector> pts;
    for (int rep = 0; rep < 3; ++rep)
        for (const auto& v : {e(2, 0), -e(2, 0), e(2, 1), -e(2, 1)}) pts.push_back(v);
    const auto fit = fit_watson_mixture_em(SampleSet(pts), {.components = 1});
    EXPECT_EQ(fit.mixture.kappa(0), kKappaFloor);
    EXPECT_TRUE(fit.near_uniform[0]);
    EXPECT_TRUE(fit.degenerate[0]);
}

TEST(FitWatsonEm, Preconditions) {
    const auto five = sample_watson(WatsonParams(e(2, 0), 5.0), 5, 1);
    EXPECT_THROW(fit_watson_mixture_em(five, {.components = 3}), DomainError);
    EXPECT_THROW(fit_watson_mixture_em(five, {.components = 1}), DomainError);
    const auto s3 = sample_watson(WatsonParams(e(3, 0), 5.0), 100, 1);
    EXPECT_THROW(fit_watson_mixture_em(s3, {.components = 1}), DomainError);
    const auto ok = sample_watson(WatsonParams(e(2, 0), 5.0), 30, 1);
    EXPECT_THROW(fit_watson_mixture_em(ok, {.components = 0}), DomainError);
    EXPECT_NO_THROW(fit_watson_mixture_em(ok, {.components = 3}));
}

TEST(FitWatsonEm, LogLikelihoodNeverDecreases) {
    Xoshiro256 rng(2025);
    for (int run = 0; run < 50; ++run) {
        const int k = 1 + run % 3;
        std::vector<UnitVector> dirs;
        std::vector<double> kappas;
        for (int i = 0; i < k; ++i) {
            dirs.push_back(UnitVector::from_angle(kPi * rng.uniform()));
            kappas.push_back(rng.uniform() < 0.2 ? -5.0 : 1.0 + 30.0 * rng.uniform());
        }
        const auto s = sample_mixture(WatsonMixture(dirs, kappas, {}), 400, run);
        EmOptions opt{.components = k, .shared_kappa = run % 2 == 0, .equal_weights = run % 4 < 2,
                      .seed = static_cast<std::uint64_t>(run)};
        const auto fit = fit_watson_mixture_em(s, opt);
        for (std::size_t t = 1; t < fit.trace.size(); ++t) {
            const int iter = static_cast<int>(t) - 1;
            if (std::find(fit.reinitialized_at.begin(), fit.reinitialized_at.end(), iter) != fit.reinitialized_at.end())
                continue;
            EXPECT_GE(fit.trace[t], fit.trace[t - 1] - 1e-9 * std::abs(fit.trace[t - 1])) << run << " " << t;
        }
        EXPECT_EQ(fit.log_likelihood, fit.trace.back());
    }
}

TEST(FitWatsonEm, Deterministic) {
    const auto s = sample_mixture(WatsonMixture(harmonic_fntf_r2(3), 15.0), 900, 4);
    const auto a = fit_watson_mixture_em(s, {.components = 3, .seed = 11});
    const auto b = fit_watson_mixture_em(s, {.components = 3, .seed = 11});
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.mixture.kappas(), b.mixture.kappas());
}

TEST(FitWatsonEm, RelaxedModes) {
    const WatsonMixture truth({UnitVector::from_angle(0.2), UnitVector::from_angle(1.5)}, {40.0, 8.0}, {0.7, 0.3});
    const auto s = sample_mixture(truth, 8000, 6);
    const auto fit = fit_watson_mixture_em(s, {.components = 2, .shared_kappa = false, .equal_weights = false, .seed = 2});
    ASSERT_FALSE(fit.mixture.shared_kappa());
    // Match the fitted components to the truth by director.
    const bool swapped = testing::axial_distance(fit.mixture.directors()[0].coords(), truth.directors()[0].coords()) > 0.3;
    const std::size_t i0 = swapped ? 1 : 0;
    const std::size_t i1 = 1 - i0;
    EXPECT_NEAR(fit.mixture.weights()[i0], 0.7, 0.03);
    EXPECT_NEAR(fit.mixture.kappa(i0), 40.0, 6.0);
    EXPECT_NEAR(fit.mixture.kappa(i1), 8.0, 1.5);
}

}  // namespace
}  // namespace dirstat
