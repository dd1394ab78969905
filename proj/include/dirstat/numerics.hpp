#pragma once

// Special functions behind the uniformity tests and the Watson machinery:
// log-gamma, the chi-squared survival function, Kummer's confluent
// hypergeometric M(a, b, x) with its logarithmic derivative, and I0.

#include <cmath>
#include <limits>
#include <string>

#include "dirstat/errors.hpp"

namespace dirstat {

/// Largest |x| accepted by kummer_m and bessel_i0. exp(500) is still well
/// inside double range, so the series never overflows on this interval.
inline constexpr double kKummerMaxArgument = 500.0;

namespace detail {

inline constexpr int kSeriesMaxTerms = 10000;
inline constexpr double kSeriesRelTol = 1e-16;

// Deterministic stopping rule shared by every power series in this header:
// stop once three consecutive terms contribute less than kSeriesRelTol
// relative to the running sum.
class SeriesStop {
public:
    bool converged(double term, double sum) {
        if (std::abs(term) < kSeriesRelTol * std::abs(sum)) {
            ++small_;
        } else {
            small_ = 0;
        }
        return small_ >= 3;
    }

private:
    int small_ = 0;
};

[[noreturn]] inline void throw_series_cap(const char* who) {
    throw_domain(std::string(who) + ": series did not converge within " +
                 std::to_string(kSeriesMaxTerms) + " terms");
}

// Sum_{k>=0} (a)_k x^k / ((b)_k k!) by direct summation.
inline double kummer_series(double a, double b, double x) {
    double term = 1.0;
    double sum = 1.0;
    SeriesStop stop;
    for (int k = 0; k < kSeriesMaxTerms; ++k) {
        term *= (a + k) * x / ((b + k) * (k + 1));
        sum += term;
        if (term == 0.0 || stop.converged(term, sum)) return sum;
    }
    throw_series_cap("kummer_m");
}

// Returns (d/dx M(a,b,x)) / M(a,b,x) summing both series term by term.
inline double kummer_series_log_derivative(double a, double b, double x) {
    // term_k = (a)_k x^k / ((b)_k k!), deriv_k = k term_k / x kept without the
    // division so x = 0 needs no special case.
    double term = 1.0;
    double sum = 1.0;
    double deriv = a / b;
    double dsum = deriv;
    SeriesStop stop;
    SeriesStop dstop;
    bool done = false;
    bool ddone = false;
    for (int k = 0; k < kSeriesMaxTerms; ++k) {
        if (!done) {
            term *= (a + k) * x / ((b + k) * (k + 1));
            sum += term;
            done = term == 0.0 || stop.converged(term, sum);
        }
        if (!ddone) {
            deriv *= (a + k + 1) * x / ((b + k + 1) * (k + 1));
            dsum += deriv;
            ddone = deriv == 0.0 || dstop.converged(deriv, dsum);
        }
        if (done && ddone) return dsum / sum;
    }
    throw_series_cap("kummer_log_derivative");
}

inline void check_kummer_args(double b, double x, const char* who) {
    if (!(b > 0.0)) throw_domain(std::string(who) + ": b must be positive");
    if (!(std::abs(x) <= kKummerMaxArgument))
        throw_domain(std::string(who) + ": |x| exceeds the supported range " +
                     std::to_string(kKummerMaxArgument));
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
inline double ln_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) detail::throw_domain("ln_gamma: x must be positive and finite");
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
///
/// Lower series for x <= a, Lentz continued fraction for the upper tail
/// otherwise, so neither route subtracts two numbers close to one.
inline double gamma_q(double a, double x) {
    if (!(a > 0.0)) detail::throw_domain("gamma_q: a must be positive");
    if (!(x >= 0.0)) detail::throw_domain("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double log_prefactor = a * std::log(x) - x - ln_gamma(a);
    if (x <= a) {
        double term = 1.0 / a;
        double sum = term;
        detail::SeriesStop stop;
        for (int n = 1; n < detail::kSeriesMaxTerms; ++n) {
            term *= x / (a + n);
            sum += term;
            if (stop.converged(term, sum)) return 1.0 - sum * std::exp(log_prefactor);
        }
        detail::throw_series_cap("gamma_q");
    }
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < detail::kSeriesMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return std::exp(log_prefactor) * h;
    }
    detail::throw_series_cap("gamma_q");
}

/// Chi-squared distribution with a positive integer number of degrees of freedom.
class ChiSquared {
public:
    explicit ChiSquared(int df) : df_(df) {
        if (df < 1) detail::throw_domain("ChiSquared: df must be at least 1");
    }

    int df() const noexcept { return df_; }

    /// P(X > x).
    double sf(double x) const {
        if (!(x >= 0.0)) detail::throw_domain("chi2_sf: x must be nonnegative");
        return gamma_q(0.5 * df_, 0.5 * x);
    }

private:
    int df_;
};

/// Survival function of the chi-squared distribution, P(chi2_df > x).
inline double chi2_sf(double x, int df) { return ChiSquared(df).sf(x); }

/// Kummer's confluent hypergeometric function M(a, b, x) = 1F1(a; b; x).
///
/// Direct Taylor series for x >= 0. Negative arguments go through the Kummer
/// transform M(a,b,x) = e^x M(b-a, b, -x), which avoids the cancellation of the
/// alternating series (the girdle Watson case lives there).
inline double kummer_m(double a, double b, double x) {
    detail::check_kummer_args(b, x, "kummer_m");
    if (x >= 0.0) return detail::kummer_series(a, b, x);
    return std::exp(x) * detail::kummer_series(b - a, b, -x);
}

/// ln M(a, b, x). Requires M > 0, which holds whenever a > 0 and b > 0.
inline double log_kummer_m(double a, double b, double x) {
    detail::check_kummer_args(b, x, "log_kummer_m");
    const double s = x >= 0.0 ? detail::kummer_series(a, b, x) : detail::kummer_series(b - a, b, -x);
    if (!(s > 0.0)) detail::throw_domain("log_kummer_m: M(a,b,x) is not positive");
    return x >= 0.0 ? std::log(s) : x + std::log(s);
}

/// d/dx ln M(a, b, x), from the term-wise derivative of the Kummer series.
/// For x < 0 the Kummer transform gives 1 - (d/dy ln M(b-a, b, y)) at y = -x.
inline double kummer_log_derivative(double a, double b, double x) {
    detail::check_kummer_args(b, x, "kummer_log_derivative");
    if (x >= 0.0) return detail::kummer_series_log_derivative(a, b, x);
    return 1.0 - detail::kummer_series_log_derivative(b - a, b, -x);
}

/// Modified Bessel function of the first kind, order zero.
inline double bessel_i0(double x) {
    if (!(std::abs(x) <= kKummerMaxArgument))
        detail::throw_domain("bessel_i0: |x| exceeds the supported range");
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    detail::SeriesStop stop;
    for (int k = 1; k < detail::kSeriesMaxTerms; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term == 0.0 || stop.converged(term, sum)) return sum;
    }
    detail::throw_series_cap("bessel_i0");
}

}  // namespace dirstat
