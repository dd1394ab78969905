#pragma once

// Watson axial distributions on S^{d-1} and finite Watson mixtures:
// normalization through Kummer's function, densities, seeded sampling,
// second-moment quadrature, EM fitting on the circle, and mode widths.
//
// Densities are taken with respect to surface measure on S^{d-1}:
//
//   f(x) = c_d(kappa) exp(kappa <z, x>^2),
//   c_d(kappa) = Gamma(d/2) / (2 pi^{d/2} M(1/2, d/2, kappa)),
//
// so that 2 pi^{d/2} / Gamma(d/2), the area of the sphere, is folded into c_d.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dirstat/core.hpp"
#include "dirstat/numerics.hpp"
#include "dirstat/parallel.hpp"
#include "dirstat/quadrature.hpp"
#include "dirstat/random.hpp"

namespace dirstat {

/// Smallest |kappa| a fit may report; below it the component is near uniform.
inline constexpr double kKappaFloor = 1e-6;

/// One Watson component: director z0 and nonzero concentration kappa.
class WatsonParams {
public:
    WatsonParams(UnitVector director, double kappa) : director_(std::move(director)), kappa_(kappa) {
        if (!(kappa != 0.0) || !std::isfinite(kappa))
            detail::throw_domain("WatsonParams: kappa must be finite and nonzero");
    }

    const UnitVector& director() const noexcept { return director_; }
    double kappa() const noexcept { return kappa_; }
    int dim() const noexcept { return director_.dim(); }

private:
    UnitVector director_;
    double kappa_;
};

/// Mixture sum_i w_i Watson(z_i, kappa_i). The default construction is the
/// equal-weight, shared-concentration form.
class WatsonMixture {
public:
    WatsonMixture(std::vector<UnitVector> directors, double kappa)
        : WatsonMixture(std::move(directors), std::vector<double>{kappa}, {}) {}

    /// `kappas` holds one shared value or one per director; empty `weights`
    /// means 1/N each.
    WatsonMixture(std::vector<UnitVector> directors, std::vector<double> kappas, std::vector<double> weights)
        : directors_(std::move(directors)), kappas_(std::move(kappas)), weights_(std::move(weights)) {
        if (directors_.empty()) detail::throw_data("WatsonMixture: need at least one director");
        const int d = directors_.front().dim();
        for (const auto& z : directors_)
            if (z.dim() != d) detail::throw_data("WatsonMixture: directors of mixed dimension");
        const std::size_t n = directors_.size();
        if (kappas_.size() != 1 && kappas_.size() != n)
            detail::throw_data("WatsonMixture: expected 1 or N concentrations");
        for (double k : kappas_)
            if (!(k != 0.0) || !std::isfinite(k)) detail::throw_domain("WatsonMixture: kappa must be finite and nonzero");
        if (weights_.empty()) weights_.assign(n, 1.0 / static_cast<double>(n));
        if (weights_.size() != n) detail::throw_data("WatsonMixture: weight count does not match director count");
        double total = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) detail::throw_data("WatsonMixture: weights must be nonnegative");
            total += w;
        }
        if (!(std::abs(total - 1.0) <= 1e-12))
            detail::throw_data("WatsonMixture: weights must sum to 1");
    }

    std::size_t size() const noexcept { return directors_.size(); }
    int dim() const noexcept { return directors_.front().dim(); }
    bool shared_kappa() const noexcept { return kappas_.size() == 1; }
    const std::vector<UnitVector>& directors() const noexcept { return directors_; }
    const std::vector<double>& kappas() const noexcept { return kappas_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double kappa(std::size_t i) const { return shared_kappa() ? kappas_.front() : kappas_.at(i); }
    WatsonParams component(std::size_t i) const { return WatsonParams(directors_.at(i), kappa(i)); }

private:
    std::vector<UnitVector> directors_;
    std::vector<double> kappas_;
    std::vector<double> weights_;
};

/// ln c_d(kappa). kappa = 0 is allowed here (the uniform density).
inline double watson_log_normalizer(double kappa, int d) {
    if (d < 1) detail::throw_domain("watson_normalizer: d must be positive");
    const double half_d = 0.5 * d;
    return ln_gamma(half_d) - std::numbers::ln2 - half_d * std::log(std::numbers::pi) -
           log_kummer_m(0.5, half_d, kappa);
}

/// c_d(kappa) = Gamma(d/2) / (2 pi^{d/2} M(1/2, d/2, kappa)).
inline double watson_normalizer(double kappa, int d) { return std::exp(watson_log_normalizer(kappa, d)); }

/// E[<z, x>^2] under Watson(z, kappa) on S^{d-1}: m(kappa) = d/dkappa ln M(1/2, d/2, kappa).
inline double watson_mean_sq(double kappa, int d) { return kummer_log_derivative(0.5, 0.5 * d, kappa); }

/// Log density against surface measure.
inline double watson_log_density(const UnitVector& x, const WatsonParams& p) {
    if (x.dim() != p.dim()) detail::throw_data("watson_log_density: dimension mismatch");
    const double t = x.dot(p.director());
    return watson_log_normalizer(p.kappa(), p.dim()) + p.kappa() * t * t;
}

/// Log density of the mixture against surface measure.
inline double mixture_log_density(const UnitVector& x, const WatsonMixture& mix) {
    if (x.dim() != mix.dim()) detail::throw_data("mixture_log_density: dimension mismatch");
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
        const double t = x.dot(mix.directors()[i]);
        const double k = mix.kappa(i);
        terms[i] = std::log(mix.weights()[i]) + watson_log_normalizer(k, mix.dim()) + k * t * t;
        best = std::max(best, terms[i]);
    }
    double s = 0.0;
    for (double v : terms) s += std::exp(v - best);
    return best + std::log(s);
}

namespace detail {

inline void check_sampling_dim(int d, const char* who) {
    if (d != 2 && d != 3) throw_domain(std::string(who) + ": sampling supports d = 2 or 3 only");
}

// Accept-reject from the uniform proposal with envelope exp(max(kappa, 0)).
inline Vector draw_watson(Xoshiro256& rng, const Vector& z, double kappa) {
    const int d = static_cast<int>(z.size());
    const double shift = std::max(kappa, 0.0);
    double g[3] = {0.0, 0.0, 0.0};
    for (;;) {
        // Inline version of uniform_on_sphere without the heap allocation.
        double norm2 = 0.0;
        for (int r = 0; r < d; ++r) {
            g[r] = rng.normal();
            norm2 += g[r] * g[r];
        }
        if (!(norm2 > 1e-300)) continue;
        double t = 0.0;
        for (int r = 0; r < d; ++r) t += z[r] * g[r];
        const double t2 = t * t / norm2;
        const double log_accept = kappa * t2 - shift;
        if (log_accept >= 0.0 || std::log(rng.uniform()) < log_accept) {
            const double inv = 1.0 / std::sqrt(norm2);
            Vector x(d);
            for (int r = 0; r < d; ++r) x[r] = g[r] * inv;
            return x;
        }
    }
}

// Component choice uses its own stream so a one-component mixture reproduces
// sample_watson exactly.
inline constexpr std::uint64_t kComponentStream = 0x5bd1e9955bd1e995ULL;

}  // namespace detail

/// n draws from Watson(z, kappa); draw k uses stream child_seed(seed, k).
inline SampleSet sample_watson(const WatsonParams& p, std::size_t n, std::uint64_t seed, unsigned threads = 1) {
    detail::check_sampling_dim(p.dim(), "sample_watson");
    if (n == 0) detail::throw_domain("sample_watson: n must be positive");
    Matrix pts(p.dim(), static_cast<Eigen::Index>(n));
    detail::parallel_for(n, threads, [&](std::size_t k) {
        Xoshiro256 rng(child_seed(seed, k));
        pts.col(static_cast<Eigen::Index>(k)) = detail::draw_watson(rng, p.director().coords(), p.kappa());
    });
    return SampleSet::from_columns(pts);
}

/// n draws from the mixture: component i with probability w_i, then a Watson draw.
inline SampleSet sample_mixture(const WatsonMixture& mix, std::size_t n, std::uint64_t seed, unsigned threads = 1) {
    detail::check_sampling_dim(mix.dim(), "sample_mixture");
    if (n == 0) detail::throw_domain("sample_mixture: n must be positive");
    std::vector<double> cumulative(mix.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < mix.size(); ++i) cumulative[i] = acc += mix.weights()[i];
    Matrix pts(mix.dim(), static_cast<Eigen::Index>(n));
    detail::parallel_for(n, threads, [&](std::size_t k) {
        std::size_t comp = 0;
        if (mix.size() > 1) {
            Xoshiro256 pick(child_seed(seed ^ detail::kComponentStream, k));
            const double u = pick.uniform() * acc;
            comp = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                            cumulative.begin());
            comp = std::min(comp, mix.size() - 1);
        }
        Xoshiro256 rng(child_seed(seed, k));
        pts.col(static_cast<Eigen::Index>(k)) =
            detail::draw_watson(rng, mix.directors()[comp].coords(), mix.kappa(comp));
    });
    return SampleSet::from_columns(pts);
}

/// Integral of f(x) = mixture density times `g(x)` over the sphere (d = 2, 3).
template <typename G>
auto integrate_against_mixture(const WatsonMixture& mix, G&& g) {
    const int d = mix.dim();
    detail::check_sampling_dim(d, "integrate_against_mixture");
    std::vector<double> scale(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i)
        scale[i] = mix.weights()[i] * watson_normalizer(mix.kappa(i), d);
    auto density = [&](const auto& x) {
        double f = 0.0;
        for (std::size_t i = 0; i < mix.size(); ++i) {
            const double t = mix.directors()[i].coords().dot(x);
            f += scale[i] * std::exp(mix.kappa(i) * t * t);
        }
        return f;
    };
    if (d == 2) {
        return quadrature::integrate_circle([&](double theta) {
            const Vector x = (Vector(2) << std::cos(theta), std::sin(theta)).finished();
            return decltype(g(x))(density(x) * g(x));
        });
    }
    return quadrature::integrate_sphere([&](const Eigen::Vector3d& x3) {
        const Vector x = x3;
        return decltype(g(x))(density(x) * g(x));
    });
}

/// M(mu) = integral of x x^T against the mixture, by quadrature.
inline Matrix mixture_second_moments(const WatsonMixture& mix) {
    return integrate_against_mixture(mix, [](const Vector& x) -> Matrix { return x * x.transpose(); });
}

/// Second moments of a single Watson component in closed form:
/// m z z^T + (1 - m)/(d - 1) (I - z z^T) with m = watson_mean_sq(kappa, d).
inline Matrix watson_second_moments(const WatsonParams& p) {
    const int d = p.dim();
    const double m = watson_mean_sq(p.kappa(), d);
    const Vector& z = p.director().coords();
    const Matrix zz = z * z.transpose();
    return m * zz + (1.0 - m) / (d - 1) * (Matrix::Identity(d, d) - zz);
}

struct ModeWidth {
    UnitVector direction;
    /// arccos(sqrt(m(kappa))) in radians; absent for girdle components (kappa < 0).
    std::optional<double> width;
};

/// Directional modes and their widths, in director order.
inline std::vector<ModeWidth> mode_widths(const WatsonMixture& mix) {
    std::vector<ModeWidth> out;
    out.reserve(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
        const double k = mix.kappa(i);
        std::optional<double> width;
        if (k > 0.0) width = std::acos(std::sqrt(std::min(1.0, watson_mean_sq(k, mix.dim()))));
        out.push_back(ModeWidth{mix.directors()[i], width});
    }
    return out;
}

// ---------------------------------------------------------------------------
// EM fitting on the circle

struct EmOptions {
    int components = 1;
    bool shared_kappa = true;
    bool equal_weights = true;
    int max_iters = 500;
    /// Stop when the log-likelihood gain falls below tol * max(1, |ll|).
    double tol = 1e-10;
    std::uint64_t seed = 0;
};

struct EmResult {
    WatsonMixture mixture;
    double log_likelihood = 0.0;
    /// Log-likelihood before each M-step, followed by the final value.
    std::vector<double> trace;
    /// Iterations (indices into trace transitions) where a component was reinitialized.
    std::vector<int> reinitialized_at;
    int iterations = 0;
    bool converged = false;
    /// Per component: |kappa| was lifted to kKappaFloor.
    std::vector<bool> near_uniform;
    /// Per component: the weighted scatter has a (numerically) repeated top
    /// eigenvalue, so the director is not identifiable.
    std::vector<bool> degenerate;
    std::vector<std::string> warnings;
};

namespace detail {

struct KappaSolve {
    double kappa;
    bool capped = false;
    bool floored = false;
};

// Root of m(kappa) = target on [-max, max]; m is strictly increasing.
inline KappaSolve solve_kappa(double target, int d) {
    constexpr double bound = kKummerMaxArgument;
    KappaSolve out{0.0};
    if (!(watson_mean_sq(bound, d) > target)) return {bound, true, false};
    if (!(watson_mean_sq(-bound, d) < target)) return {-bound, true, false};
    double lo = -bound;
    double hi = bound;
    while (hi - lo > 1e-13 * std::max(1.0, std::abs(lo + hi))) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (watson_mean_sq(mid, d) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.kappa = 0.5 * (lo + hi);
    if (std::abs(out.kappa) < kKappaFloor) {
        out.kappa = kKappaFloor;
        out.floored = true;
    }
    return out;
}

inline double wrap_two_pi(double a) {
    a = std::fmod(a, 2.0 * std::numbers::pi);
    return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

inline double circular_distance(double a, double b) {
    const double diff = std::abs(wrap_two_pi(a - b));
    return std::min(diff, 2.0 * std::numbers::pi - diff);
}

// k-means++ seeding and Lloyd refinement on doubled angles. Returns doubled
// center angles and hard labels.
inline std::pair<std::vector<double>, std::vector<int>> seed_doubled_angles(const std::vector<double>& phi, int k,
                                                                            std::uint64_t seed) {
    Xoshiro256 rng(child_seed(seed, 0));
    const std::size_t n = phi.size();
    std::vector<double> centers;
    centers.push_back(phi[std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)))]);
    std::vector<double> dist2(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers) best = std::min(best, circular_distance(phi[j], c));
            dist2[j] = best * best;
            total += dist2[j];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double u = rng.uniform() * total;
            for (pick = 0; pick + 1 < n; ++pick) {
                u -= dist2[pick];
                if (u < 0.0) break;
            }
        } else {
            pick = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
        }
        centers.push_back(phi[pick]);
    }
    std::vector<int> label(n, 0);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (std::size_t j = 0; j < n; ++j) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double dd = circular_distance(phi[j], centers[static_cast<std::size_t>(c)]);
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (label[j] != best) changed = true;
            label[j] = best;
        }
        for (int c = 0; c < k; ++c) {
            double s = 0.0;
            double co = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (label[j] == c) {
                    s += std::sin(phi[j]);
                    co += std::cos(phi[j]);
                }
            if (s != 0.0 || co != 0.0) centers[static_cast<std::size_t>(c)] = std::atan2(s, co);
        }
        if (!changed && iter > 0) break;
    }
    return {centers, label};
}

inline Vector leading_direction(const Matrix& scatter, bool largest, bool& degenerate) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
    const auto& ev = eig.eigenvalues();
    const Eigen::Index last = ev.size() - 1;
    const double scale = std::max(std::abs(ev[last]), 1e-300);
    degenerate = largest ? (ev[last] - ev[last - 1]) <= 1e-9 * scale : (ev[1] - ev[0]) <= 1e-9 * scale;
    return largest ? Vector(eig.eigenvectors().col(last)) : Vector(eig.eigenvectors().col(0));
}

}  // namespace detail

/// Expectation-maximization for a planar Watson mixture.
///
/// E-step: responsibilities from the component log densities (log-sum-exp).
/// M-step, each a conditional maximization so the likelihood never decreases:
/// weights (unless equal), directors as the top (bottom, for kappa < 0)
/// eigenvector of the responsibility-weighted scatter, then kappa by solving
/// m(kappa) = weighted mean of <z_i, x>^2.
inline EmResult fit_watson_mixture_em(const SampleSet& sample, const EmOptions& opt = {}) {
    if (sample.dim() != 2) detail::throw_domain("fit_watson_mixture_em: only d = 2 is supported");
    const int k = opt.components;
    if (k < 1) detail::throw_domain("fit_watson_mixture_em: need at least one component");
    const std::size_t n = sample.size();
    if (n < 10 * static_cast<std::size_t>(k))
        detail::throw_domain("fit_watson_mixture_em: need n >= 10 N samples (n = " + std::to_string(n) +
                             ", N = " + std::to_string(k) + ")");
    if (opt.max_iters < 1) detail::throw_domain("fit_watson_mixture_em: max_iters must be positive");
    const int d = 2;
    const auto ku = static_cast<std::size_t>(k);
    const Matrix& x = sample.points();
    const auto nn = static_cast<Eigen::Index>(n);

    // Initialization on doubled angles.
    std::vector<double> phi(n);
    for (std::size_t j = 0; j < n; ++j)
        phi[j] = detail::wrap_two_pi(2.0 * std::atan2(x(1, static_cast<Eigen::Index>(j)), x(0, static_cast<Eigen::Index>(j))));
    auto [centers, labels] = detail::seed_doubled_angles(phi, k, opt.seed);

    std::vector<Vector> z(ku);
    for (std::size_t i = 0; i < ku; ++i) z[i] = UnitVector::from_angle(0.5 * centers[i]).coords();
    std::vector<double> w(ku, 1.0 / k);
    std::vector<double> kappa(ku, 1.0);
    {
        std::vector<double> sum_t2(ku, 0.0);
        std::vector<double> count(ku, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto c = static_cast<std::size_t>(labels[j]);
            const double t = z[c].dot(x.col(static_cast<Eigen::Index>(j)));
            sum_t2[c] += t * t;
            count[c] += 1.0;
        }
        double all_t2 = 0.0;
        for (std::size_t i = 0; i < ku; ++i) all_t2 += sum_t2[i];
        for (std::size_t i = 0; i < ku; ++i) {
            const double target = opt.shared_kappa || count[i] == 0.0 ? all_t2 / static_cast<double>(n)
                                                                      : sum_t2[i] / count[i];
            kappa[i] = detail::solve_kappa(std::clamp(target, 1e-12, 1.0 - 1e-12), d).kappa;
            if (!opt.equal_weights) w[i] = std::max(count[i], 1.0) / static_cast<double>(n);
        }
        if (!opt.equal_weights) {
            double total = 0.0;
            for (double v : w) total += v;
            for (double& v : w) v /= total;
        }
    }

    EmResult result{WatsonMixture({UnitVector::basis(2, 0)}, 1.0)};
    result.near_uniform.assign(ku, false);
    result.degenerate.assign(ku, false);

    Matrix logp(static_cast<Eigen::Index>(ku), nn);
    Matrix resp(static_cast<Eigen::Index>(ku), nn);
    std::vector<double> point_ll(n);

    auto e_step = [&]() {
        double ll = 0.0;
        for (std::size_t i = 0; i < ku; ++i) {
            const double base = std::log(w[i]) + watson_log_normalizer(kappa[i], d);
            for (Eigen::Index j = 0; j < nn; ++j) {
                const double t = z[i].dot(x.col(j));
                logp(static_cast<Eigen::Index>(i), j) = base + kappa[i] * t * t;
            }
        }
        for (Eigen::Index j = 0; j < nn; ++j) {
            const double best = logp.col(j).maxCoeff();
            double s = 0.0;
            for (Eigen::Index i = 0; i < logp.rows(); ++i) {
                resp(i, j) = std::exp(logp(i, j) - best);
                s += resp(i, j);
            }
            resp.col(j) /= s;
            point_ll[static_cast<std::size_t>(j)] = best + std::log(s);
            ll += point_ll[static_cast<std::size_t>(j)];
        }
        return ll;
    };

    double ll = e_step();
    result.trace.push_back(ll);
    int iter = 0;
    for (; iter < opt.max_iters; ++iter) {
        std::vector<double> mass(ku);
        for (std::size_t i = 0; i < ku; ++i) mass[i] = resp.row(static_cast<Eigen::Index>(i)).sum();

        bool reinit = false;
        for (std::size_t i = 0; i < ku; ++i) {
            if (mass[i] >= 1e-8 * static_cast<double>(n)) continue;
            // Empty cluster: restart it on the worst-explained datum.
            const auto worst = static_cast<Eigen::Index>(
                std::min_element(point_ll.begin(), point_ll.end()) - point_ll.begin());
            z[i] = x.col(worst);
            if (!opt.equal_weights) w[i] = 1.0 / k;
            result.warnings.push_back("iteration " + std::to_string(iter) + ": component " + std::to_string(i) +
                                      " lost all responsibility and was reinitialized");
            reinit = true;
        }
        if (reinit) {
            if (!opt.equal_weights) {
                double total = 0.0;
                for (double v : w) total += v;
                for (double& v : w) v /= total;
            }
            result.reinitialized_at.push_back(iter);
            ll = e_step();
            result.trace.push_back(ll);
            continue;
        }

        if (!opt.equal_weights)
            for (std::size_t i = 0; i < ku; ++i) w[i] = mass[i] / static_cast<double>(n);

        for (std::size_t i = 0; i < ku; ++i) {
            Matrix s = Matrix::Zero(d, d);
            for (Eigen::Index j = 0; j < nn; ++j) s.noalias() += resp(static_cast<Eigen::Index>(i), j) * x.col(j) * x.col(j).transpose();
            bool degenerate = false;
            const Vector dir = detail::leading_direction(s, kappa[i] > 0.0, degenerate);
            z[i] = dir / dir.norm();
            result.degenerate[i] = degenerate;
        }

        std::vector<double> weighted_t2(ku, 0.0);
        for (std::size_t i = 0; i < ku; ++i)
            for (Eigen::Index j = 0; j < nn; ++j) {
                const double t = z[i].dot(x.col(j));
                weighted_t2[i] += resp(static_cast<Eigen::Index>(i), j) * t * t;
            }
        auto apply_solve = [&](std::size_t i, double target) {
            const auto sol = detail::solve_kappa(target, d);
            kappa[i] = sol.kappa;
            result.near_uniform[i] = sol.floored;
            if (sol.capped)
                result.warnings.push_back("iteration " + std::to_string(iter) + ": kappa capped at " +
                                          std::to_string(sol.kappa));
        };
        if (opt.shared_kappa) {
            double total = 0.0;
            for (double v : weighted_t2) total += v;
            apply_solve(0, total / static_cast<double>(n));
            for (std::size_t i = 1; i < ku; ++i) {
                kappa[i] = kappa[0];
                result.near_uniform[i] = result.near_uniform[0];
            }
        } else {
            for (std::size_t i = 0; i < ku; ++i) apply_solve(i, weighted_t2[i] / mass[i]);
        }

        const double next = e_step();
        result.trace.push_back(next);
        const double gain = next - ll;
        ll = next;
        if (gain < opt.tol * std::max(1.0, std::abs(ll))) {
            result.converged = true;
            ++iter;
            break;
        }
    }
    result.iterations = iter;
    result.log_likelihood = ll;

    std::vector<UnitVector> dirs;
    for (const auto& v : z) dirs.push_back(UnitVector::normalized(v));
    std::vector<double> ks = opt.shared_kappa ? std::vector<double>{kappa[0]} : kappa;
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    result.mixture = WatsonMixture(std::move(dirs), std::move(ks), std::move(w));
    return result;
}

}  // namespace dirstat
