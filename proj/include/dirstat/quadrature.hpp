#pragma once

// Quadrature over S^1 and S^2 with respect to surface measure. The circle uses
// the periodic trapezoidal rule (spectrally accurate for smooth periodic
// integrands); the sphere uses Gauss-Legendre in cos(theta) times the
// trapezoidal rule in the azimuth. Both refine by doubling until successive
// estimates agree.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dirstat/errors.hpp"

namespace dirstat::quadrature {

struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussLegendre gauss_legendre(int n) {
    GaussLegendre rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -z;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

namespace detail {

inline double magnitude(double v) { return std::abs(v); }

template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

template <typename T>
bool settled(const T& prev, const T& next, double tol) {
    return magnitude(next - prev) <= tol * std::max(1.0, magnitude(next));
}

}  // namespace detail

struct Options {
    double rel_tol = 1e-13;
    int initial_points = 64;
    int max_points = 1 << 20;
};

/// Integral of f(theta) over [0, 2 pi). f returns double or an Eigen matrix.
template <typename F>
auto integrate_circle(F&& f, const Options& opt = {}) {
    auto estimate = [&](int m) {
        const double h = 2.0 * std::numbers::pi / m;
        auto sum = f(0.0);
        for (int k = 1; k < m; ++k) sum = sum + f(k * h);
        return decltype(sum)(sum * h);
    };
    int m = opt.initial_points;
    auto prev = estimate(m);
    while (m < opt.max_points) {
        m *= 2;
        auto next = estimate(m);
        if (detail::settled(prev, next, opt.rel_tol)) return next;
        prev = std::move(next);
    }
    dirstat::detail::throw_domain("integrate_circle: quadrature did not settle");
}

/// Integral of f(x) over S^2 with respect to surface measure, x a unit 3-vector.
template <typename F>
auto integrate_sphere(F&& f, const Options& opt = {}) {
    auto estimate = [&](int m) {
        const auto rule = gauss_legendre(m);
        const int azimuth = 2 * m;
        const double h = 2.0 * std::numbers::pi / azimuth;
        Eigen::Vector3d x;
        bool first = true;
        decltype(f(x)) sum{};
        for (int i = 0; i < m; ++i) {
            const double u = rule.nodes[static_cast<std::size_t>(i)];
            const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
            const double w = rule.weights[static_cast<std::size_t>(i)] * h;
            for (int k = 0; k < azimuth; ++k) {
                const double phi = k * h;
                x << s * std::cos(phi), s * std::sin(phi), u;
                if (first) {
                    sum = f(x) * w;
                    first = false;
                } else {
                    sum = sum + f(x) * w;
                }
            }
        }
        return sum;
    };
    int m = std::max(8, opt.initial_points / 2);
    auto prev = estimate(m);
    while (2 * m * m < opt.max_points) {
        m *= 2;
        auto next = estimate(m);
        if (detail::settled(prev, next, opt.rel_tol)) return next;
        prev = std::move(next);
    }
    dirstat::detail::throw_domain("integrate_sphere: quadrature did not settle");
}

}  // namespace dirstat::quadrature
