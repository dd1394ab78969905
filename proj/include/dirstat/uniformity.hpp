#pragma once

// Rayleigh, modified Rayleigh and Bingham tests of uniformity on S^{d-1},
// with asymptotic chi-squared p-values, plus a seeded Monte Carlo harness for
// the statistics under the uniform null.

#include <algorithm>
#include <cstdint>
#include <string_view>
#include <vector>

#include "dirstat/core.hpp"
#include "dirstat/numerics.hpp"
#include "dirstat/parallel.hpp"
#include "dirstat/random.hpp"

namespace dirstat {

enum class TestMethod { Rayleigh, ModifiedRayleigh, Bingham };

constexpr std::string_view to_string(TestMethod m) noexcept {
    switch (m) {
        case TestMethod::Rayleigh: return "rayleigh";
        case TestMethod::ModifiedRayleigh: return "modified-rayleigh";
        case TestMethod::Bingham: return "bingham";
    }
    return "unknown";
}

/// Degrees of freedom of the limiting chi-squared law.
constexpr int test_df(TestMethod m, int dim) noexcept {
    return m == TestMethod::Bingham ? (dim - 1) * (dim + 2) / 2 : dim;
}

struct TestResult {
    TestMethod method = TestMethod::Rayleigh;
    double statistic = 0.0;
    int df = 1;
    double p_value = 1.0;
    /// Sample size; the chi-squared reference is asymptotic in n.
    std::size_t n = 0;
    int dim = 0;

    bool rejects(double level) const noexcept { return p_value < level; }
};

namespace detail {

inline TestResult make_result(TestMethod method, double statistic, std::size_t n, int dim) {
    TestResult r;
    r.method = method;
    r.statistic = statistic < 0.0 ? 0.0 : statistic;
    r.df = test_df(method, dim);
    r.p_value = chi2_sf(r.statistic, r.df);
    r.n = n;
    r.dim = dim;
    return r;
}

inline double rayleigh_statistic(const MomentSummary& m, int dim) {
    const double n = static_cast<double>(m.count);
    return dim * n * m.resultant_length * m.resultant_length;
}

inline double modified_rayleigh_statistic(const MomentSummary& m, int dim) {
    const double n = static_cast<double>(m.count);
    const double r2 = m.resultant_length * m.resultant_length;
    const double plain = dim * n * r2;
    return (1.0 - 1.0 / (2.0 * n)) * plain + plain * plain / (2.0 * n * (dim + 2));
}

inline double bingham_statistic(const MomentSummary& m, int dim) {
    const double n = static_cast<double>(m.count);
    const double d = dim;
    // trace(T^2) = ||T||_F^2 for symmetric T
    return 0.5 * d * (d + 2.0) * n * (m.scatter.squaredNorm() - 1.0 / d);
}

inline double statistic_for(TestMethod method, const MomentSummary& m, int dim) {
    switch (method) {
        case TestMethod::Rayleigh: return rayleigh_statistic(m, dim);
        case TestMethod::ModifiedRayleigh: return modified_rayleigh_statistic(m, dim);
        case TestMethod::Bingham: return bingham_statistic(m, dim);
    }
    return 0.0;
}

}  // namespace detail

/// d n rbar^2 against chi2_d.
inline TestResult rayleigh_test(const SampleSet& sample) {
    const auto m = moment_summary(sample);
    return detail::make_result(TestMethod::Rayleigh, detail::rayleigh_statistic(m, sample.dim()), sample.size(),
                               sample.dim());
}

/// (1 - 1/(2n)) d n rbar^2 + d^2 n^2 rbar^4 / (2n(d+2)) against chi2_d.
inline TestResult modified_rayleigh_test(const SampleSet& sample) {
    const auto m = moment_summary(sample);
    return detail::make_result(TestMethod::ModifiedRayleigh, detail::modified_rayleigh_statistic(m, sample.dim()),
                               sample.size(), sample.dim());
}

/// (d(d+2)/2) n (trace(T^2) - 1/d) against chi2 with (d-1)(d+2)/2 degrees of freedom.
inline TestResult bingham_test(const SampleSet& sample) {
    const auto m = moment_summary(sample);
    return detail::make_result(TestMethod::Bingham, detail::bingham_statistic(m, sample.dim()), sample.size(),
                               sample.dim());
}

inline TestResult run_test(TestMethod method, const SampleSet& sample) {
    switch (method) {
        case TestMethod::Rayleigh: return rayleigh_test(sample);
        case TestMethod::ModifiedRayleigh: return modified_rayleigh_test(sample);
        case TestMethod::Bingham: return bingham_test(sample);
    }
    return rayleigh_test(sample);
}

/// n uniform points on S^{dim-1}; point k is drawn from stream child_seed(seed, k).
inline SampleSet sample_uniform(std::size_t n, int dim, std::uint64_t seed, unsigned threads = 1) {
    detail::check_dim(dim, "sample_uniform");
    if (n == 0) detail::throw_domain("sample_uniform: n must be positive");
    Matrix pts(dim, static_cast<Eigen::Index>(n));
    detail::parallel_for(n, threads, [&](std::size_t k) {
        Xoshiro256 rng(child_seed(seed, k));
        pts.col(static_cast<Eigen::Index>(k)) = uniform_on_sphere(rng, dim);
    });
    return SampleSet::from_columns(pts);
}

/// Test statistics of `trials` independent uniform samples of size n. Trial t
/// draws from stream child_seed(seed, t); output is ordered by trial and does
/// not depend on `threads`.
inline std::vector<double> monte_carlo_null(std::size_t n, int dim, std::size_t trials, TestMethod method,
                                            std::uint64_t seed, unsigned threads = 1) {
    detail::check_dim(dim, "monte_carlo_null");
    if (n == 0) detail::throw_domain("monte_carlo_null: n must be positive");
    if (trials == 0) detail::throw_domain("monte_carlo_null: trials must be positive");
    std::vector<double> out(trials);
    detail::parallel_for(trials, threads, [&](std::size_t t) {
        Xoshiro256 rng(child_seed(seed, t));
        Matrix pts(dim, static_cast<Eigen::Index>(n));
        for (Eigen::Index k = 0; k < pts.cols(); ++k) pts.col(k) = uniform_on_sphere(rng, dim);
        const auto m = moment_summary(SampleSet::from_columns(pts));
        out[t] = std::max(0.0, detail::statistic_for(method, m, dim));
    });
    return out;
}

}  // namespace dirstat
