#pragma once

// Finite and probabilistic unit norm frames: optimal frame bounds, tight-frame
// checks and the harmonic construction in R^2, the frame / Riesz-2 /
// fractional potentials of a discrete measure, the directional force, and a
// projected-gradient descent that tightens a vector system toward directional
// equilibrium.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dirstat/core.hpp"
#include "dirstat/random.hpp"

namespace dirstat {

/// Optimal lower and upper frame bounds (A, B).
struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;

    /// Spanning set: A > 0.
    bool is_frame() const noexcept { return lower > 0.0; }
    /// B - A <= 1e-10 max(1, B).
    bool is_tight() const noexcept { return upper - lower <= 1e-10 * std::max(1.0, upper); }
};

struct PotentialReport {
    double frame_potential = 0.0;
    double riesz_potential = 0.0;
    /// frame_potential / riesz_potential; absent for point masses.
    std::optional<double> fractional;
    double moment_deviation = 0.0;
};

namespace detail {

inline Matrix frame_operator(std::span<const UnitVector> vectors) {
    if (vectors.empty()) throw_data("frame: empty vector list");
    const int d = vectors.front().dim();
    Matrix s = Matrix::Zero(d, d);
    for (const auto& v : vectors) {
        if (v.dim() != d) throw_data("frame: vectors of mixed dimension");
        s.noalias() += v.coords() * v.coords().transpose();
    }
    return s;
}

}  // namespace detail

/// Extreme eigenvalues of the frame operator S = sum x_i x_i^T.
inline FrameBounds frame_bounds(std::span<const UnitVector> vectors) {
    const Matrix s = detail::frame_operator(vectors);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    FrameBounds b;
    b.lower = std::max(0.0, ev.minCoeff());
    b.upper = ev.maxCoeff();
    return b;
}

/// True iff ||S/n - I/d||_F <= tol.
inline bool is_fntf(std::span<const UnitVector> vectors, double tol) {
    if (!(tol > 0.0)) detail::throw_domain("is_fntf: tol must be positive");
    const Matrix s = detail::frame_operator(vectors);
    const auto d = s.rows();
    const double n = static_cast<double>(vectors.size());
    return (s / n - Matrix::Identity(d, d) / static_cast<double>(d)).norm() <= tol;
}

/// Angles k pi / n, k = 0..n-1.
inline std::vector<double> harmonic_angles_r2(int n) {
    if (n < 2) detail::throw_domain("harmonic_fntf_r2: n must be at least 2");
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) angles[static_cast<std::size_t>(k)] = k * std::numbers::pi / n;
    return angles;
}

/// n unit vectors equally spaced on the half circle; a FNTF for R^2.
inline std::vector<UnitVector> harmonic_fntf_r2(int n) {
    std::vector<UnitVector> out;
    for (double a : harmonic_angles_r2(n)) out.push_back(UnitVector::from_angle(a));
    return out;
}

/// |sum_k exp(2 i alpha_k)|; zero iff the directions form a FNTF for R^2.
inline double fntf_defect_r2(std::span<const double> angles) {
    if (angles.empty()) detail::throw_data("fntf_defect_r2: empty angle list");
    std::complex<double> sum{0.0, 0.0};
    for (double a : angles) sum += std::polar(1.0, 2.0 * a);
    return std::abs(sum);
}

/// sum_{i,j} w_i w_j <x_i, x_j>^2, summed in row-major order.
inline double frame_potential(const DiscreteMeasure& mu) {
    const Matrix& x = mu.atoms().points();
    const Vector& w = mu.weights();
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double c = x.col(i).dot(x.col(j));
            row += w[j] * c * c;
        }
        total += w[i] * row;
    }
    return total;
}

/// sum_{i,j} w_i w_j ||x_i - x_j||^2.
inline double riesz_potential(const DiscreteMeasure& mu) {
    const Matrix& x = mu.atoms().points();
    const Vector& w = mu.weights();
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) row += w[j] * (x.col(i) - x.col(j)).squaredNorm();
        total += w[i] * row;
    }
    return total;
}

/// Frame potential over Riesz-2 potential. Throws for (near) point masses,
/// where the Riesz potential vanishes.
inline double fractional_potential(const DiscreteMeasure& mu) {
    const double riesz = riesz_potential(mu);
    if (!(riesz >= 1e-14)) detail::throw_domain("fractional_potential: undefined for a point mass");
    return frame_potential(mu) / riesz;
}

inline PotentialReport potential_report(const DiscreteMeasure& mu) {
    PotentialReport r;
    r.frame_potential = frame_potential(mu);
    r.riesz_potential = riesz_potential(mu);
    if (r.riesz_potential >= 1e-14) r.fractional = r.frame_potential / r.riesz_potential;
    r.moment_deviation = moment_deviation(mu);
    return r;
}

/// F(a, b) = 2 |<a, b>| (a - b).
inline Vector directional_force(const UnitVector& a, const UnitVector& b) {
    if (a.dim() != b.dim()) detail::throw_data("directional_force: dimension mismatch");
    return 2.0 * std::abs(a.dot(b)) * (a.coords() - b.coords());
}

struct TightenOptions {
    int max_steps = 10000;
    double step_size = 0.25;
    /// Stop once frame_potential - 1/d <= tol.
    double tol = 1e-10;
    /// Seed for the tie-breaking perturbation at symmetric saddles.
    std::uint64_t seed = 0;
};

struct TightenResult {
    std::vector<UnitVector> vectors;
    /// Frame potential of the counting measure after every accepted step,
    /// starting with the input configuration. Nonincreasing.
    std::vector<double> trace;
    bool converged = false;
    int steps = 0;
    /// Largest tangential gradient norm over the vectors at exit.
    double max_tangential_force = 0.0;
};

namespace detail {

// Frame potential of the counting measure on the columns of x, via the
// scatter matrix: sum_{i,j} <x_i,x_j>^2 / n^2 = ||T||_F^2.
inline double counting_frame_potential(const Matrix& x) {
    const Matrix t = x * x.transpose() / static_cast<double>(x.cols());
    return t.squaredNorm();
}

// Tangential part of 4 T x_i, the per-vector gradient of n ||T||_F^2.
inline Matrix tangential_gradient(const Matrix& x) {
    const Matrix t = x * x.transpose() / static_cast<double>(x.cols());
    Matrix g = 4.0 * t * x;
    for (Eigen::Index i = 0; i < x.cols(); ++i) g.col(i) -= g.col(i).dot(x.col(i)) * x.col(i);
    return g;
}

inline Matrix retract(const Matrix& x) {
    Matrix y = x;
    for (Eigen::Index i = 0; i < y.cols(); ++i) y.col(i).normalize();
    return y;
}

}  // namespace detail

/// Projected gradient descent on the frame potential sum_{i,j} <x_i,x_j>^2
/// over the product of spheres, with backtracking (the step is halved until
/// the potential does not increase). Minimizers are the FNTFs, where the
/// potential equals 1/d.
inline TightenResult gradient_tighten(std::span<const UnitVector> vectors, const TightenOptions& opt = {}) {
    if (!(opt.step_size > 0.0)) detail::throw_domain("gradient_tighten: step_size must be positive");
    const Matrix s = detail::frame_operator(vectors);
    const auto d = s.rows();
    const auto n = static_cast<Eigen::Index>(vectors.size());
    if (n < d) detail::throw_domain("gradient_tighten: need at least d vectors");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * static_cast<double>(n)))
        detail::throw_domain("gradient_tighten: input vectors do not span R^d");

    Matrix x(d, n);
    for (Eigen::Index i = 0; i < n; ++i) x.col(i) = vectors[static_cast<std::size_t>(i)].coords();

    const double target = 1.0 / static_cast<double>(d);
    double pfp = detail::counting_frame_potential(x);
    TightenResult result;
    result.trace.push_back(pfp);

    double step = opt.step_size;
    Xoshiro256 rng(child_seed(opt.seed, 0));
    Matrix grad = detail::tangential_gradient(x);
    bool moved = false;
    while (pfp - target > opt.tol && result.steps < opt.max_steps) {
        double force = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) force = std::max(force, grad.col(i).norm());
        if (force < 1e-14) {
            // Saddle with vanishing force but not at the minimum.
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index r = 0; r < d; ++r) x(r, i) += 1e-8 * rng.normal();
            x = detail::retract(x);
            moved = true;
            pfp = detail::counting_frame_potential(x);
            grad = detail::tangential_gradient(x);
            continue;
        }
        bool accepted = false;
        while (step > 1e-20) {
            const Matrix candidate = detail::retract(x - step * grad);
            const double cand_pfp = detail::counting_frame_potential(candidate);
            if (cand_pfp <= pfp) {
                x = candidate;
                pfp = cand_pfp;
                accepted = moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        ++result.steps;
        result.trace.push_back(pfp);
        grad = detail::tangential_gradient(x);
        step = std::min(opt.step_size, 2.0 * step);
    }

    result.converged = pfp - target <= opt.tol;
    for (Eigen::Index i = 0; i < n; ++i)
        result.max_tangential_force = std::max(result.max_tangential_force, grad.col(i).norm());
    if (!moved) {
        result.vectors.assign(vectors.begin(), vectors.end());
        return result;
    }
    result.vectors.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) result.vectors.push_back(UnitVector::normalized(x.col(i)));
    return result;
}

}  // namespace dirstat
