#pragma once

// Data model for points on S^{d-1}: unit vectors, samples, weighted discrete
// measures, and their first and second moments.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dirstat/errors.hpp"

namespace dirstat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 16;

/// Tolerance accepted by UnitVector::checked before exact renormalization.
inline constexpr double kIngestNormTolerance = 1e-6;

/// Points this close to unit norm are already unit up to their decimal
/// representation and are stored as given.
inline constexpr double kRepresentationTolerance = 1e-10;

namespace detail {

inline void check_dim(Eigen::Index dim, const char* who) {
    if (dim < kMinDim || dim > kMaxDim)
        throw_data(std::string(who) + ": dimension " + std::to_string(dim) + " outside [2, 16]");
}

}  // namespace detail

/// A point of S^{d-1}. Always unit norm: construction normalizes and rejects
/// zero or non-finite input.
class UnitVector {
public:
    /// Normalizes any nonzero finite vector.
    static UnitVector normalized(Vector v) {
        detail::check_dim(v.size(), "UnitVector");
        if (!v.allFinite()) detail::throw_data("UnitVector: non-finite coordinates");
        const double norm = v.norm();
        if (!(norm > 0.0)) detail::throw_data("UnitVector: zero vector has no direction");
        v /= norm;
        return UnitVector(std::move(v));
    }

    /// Accepts vectors whose norm is within `tol` of one, then renormalizes.
    static UnitVector checked(Vector v, double tol = kIngestNormTolerance) {
        const double norm = v.norm();
        if (!(std::abs(norm - 1.0) <= tol))
            detail::throw_data("UnitVector: norm " + std::to_string(norm) + " is not within tolerance of 1");
        return normalized(std::move(v));
    }

    /// (cos theta, sin theta).
    static UnitVector from_angle(double theta) {
        Vector v(2);
        v << std::cos(theta), std::sin(theta);
        return normalized(std::move(v));
    }

    static UnitVector basis(int dim, int axis) {
        Vector v = Vector::Zero(dim);
        v[axis] = 1.0;
        return normalized(std::move(v));
    }

    const Vector& coords() const noexcept { return coords_; }
    int dim() const noexcept { return static_cast<int>(coords_.size()); }
    double operator[](Eigen::Index i) const { return coords_[i]; }
    double dot(const UnitVector& other) const { return coords_.dot(other.coords_); }

    UnitVector operator-() const { return UnitVector(-coords_); }

private:
    explicit UnitVector(Vector v) : coords_(std::move(v)) {}

    Vector coords_;
};

/// An ordered, nonempty list of points on S^{d-1} sharing one dimension,
/// stored column-wise in a d x n matrix.
class SampleSet {
public:
    explicit SampleSet(const std::vector<UnitVector>& points) {
        if (points.empty()) detail::throw_data("SampleSet: empty sample");
        const int dim = points.front().dim();
        points_.resize(dim, static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].dim() != dim)
                detail::throw_data("SampleSet: point " + std::to_string(i) + " has dimension " +
                                   std::to_string(points[i].dim()) + ", expected " + std::to_string(dim));
            points_.col(static_cast<Eigen::Index>(i)) = points[i].coords();
        }
    }

    /// Builds a sample from the columns of `columns`, normalizing each one.
    static SampleSet from_columns(const Matrix& columns) {
        if (columns.cols() == 0) detail::throw_data("SampleSet: empty sample");
        detail::check_dim(columns.rows(), "SampleSet");
        SampleSet s;
        s.points_.resize(columns.rows(), columns.cols());
        for (Eigen::Index i = 0; i < columns.cols(); ++i)
            s.points_.col(i) = UnitVector::normalized(columns.col(i)).coords();
        return s;
    }

    /// Builds a sample from columns that must be unit within `tol`. Columns
    /// within kRepresentationTolerance are kept bit for bit, the rest are
    /// normalized.
    static SampleSet from_unit_columns(const Matrix& columns, double tol = kIngestNormTolerance) {
        if (columns.cols() == 0) detail::throw_data("SampleSet: empty sample");
        detail::check_dim(columns.rows(), "SampleSet");
        SampleSet s;
        s.points_.resize(columns.rows(), columns.cols());
        for (Eigen::Index i = 0; i < columns.cols(); ++i) {
            if (!columns.col(i).allFinite()) detail::throw_data("SampleSet: non-finite coordinates");
            const double dev = std::abs(columns.col(i).norm() - 1.0);
            if (dev <= kRepresentationTolerance) {
                s.points_.col(i) = columns.col(i);
            } else {
                s.points_.col(i) = UnitVector::checked(columns.col(i), tol).coords();
            }
        }
        return s;
    }

    /// Planar sample (cos theta_k, sin theta_k).
    static SampleSet from_angles(const std::vector<double>& angles) {
        if (angles.empty()) detail::throw_data("SampleSet: empty sample");
        SampleSet s;
        s.points_.resize(2, static_cast<Eigen::Index>(angles.size()));
        for (std::size_t i = 0; i < angles.size(); ++i)
            s.points_.col(static_cast<Eigen::Index>(i)) = UnitVector::from_angle(angles[i]).coords();
        return s;
    }

    int dim() const noexcept { return static_cast<int>(points_.rows()); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    const Matrix& points() const noexcept { return points_; }
    auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }

    UnitVector at(std::size_t i) const { return UnitVector::normalized(points_.col(static_cast<Eigen::Index>(i))); }

    std::vector<UnitVector> to_vectors() const {
        std::vector<UnitVector> out;
        out.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i));
        return out;
    }

    /// Applies a linear map to every point (use an orthogonal matrix to rotate).
    SampleSet transformed(const Matrix& map) const { return from_columns(map * points_); }

private:
    SampleSet() = default;

    Matrix points_;
};

/// Weighted point masses on S^{d-1}; weights are nonnegative and sum to one.
class DiscreteMeasure {
public:
    inline static constexpr double kWeightSumTolerance = 1e-12;

    DiscreteMeasure(SampleSet atoms, Vector weights) : atoms_(std::move(atoms)), weights_(std::move(weights)) {
        if (static_cast<std::size_t>(weights_.size()) != atoms_.size())
            detail::throw_data("DiscreteMeasure: weight count does not match atom count");
        double total = 0.0;
        for (Eigen::Index i = 0; i < weights_.size(); ++i) {
            if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
                detail::throw_data("DiscreteMeasure: weights must be finite and nonnegative");
            total += weights_[i];
        }
        if (!(std::abs(total - 1.0) <= kWeightSumTolerance))
            detail::throw_data("DiscreteMeasure: weights sum to " + std::to_string(total) + ", not 1");
    }

    /// Normalized counting measure: weight 1/n on every point.
    static DiscreteMeasure counting(SampleSet atoms) {
        const auto n = static_cast<Eigen::Index>(atoms.size());
        Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
        return DiscreteMeasure(std::move(atoms), std::move(w), Unchecked{});
    }

    /// Rescales nonnegative raw weights to sum to one.
    static DiscreteMeasure normalized(SampleSet atoms, Vector raw) {
        const double total = raw.sum();
        if (!(total > 0.0)) detail::throw_data("DiscreteMeasure: weights must have positive total");
        return DiscreteMeasure(std::move(atoms), raw / total);
    }

    int dim() const noexcept { return atoms_.dim(); }
    std::size_t size() const noexcept { return atoms_.size(); }
    const SampleSet& atoms() const noexcept { return atoms_; }
    const Vector& weights() const noexcept { return weights_; }

private:
    struct Unchecked {};
    DiscreteMeasure(SampleSet atoms, Vector weights, Unchecked)
        : atoms_(std::move(atoms)), weights_(std::move(weights)) {}

    SampleSet atoms_;
    Vector weights_;
};

/// First and second moments of a sample or measure.
struct MomentSummary {
    Vector mean;
    double resultant_length = 0.0;
    /// Absent when the resultant length is below kMeanDirectionFloor.
    std::optional<UnitVector> mean_direction;
    /// Fisher (scatter) matrix, sum_i w_i x_i x_i^T.
    Matrix scatter;
    std::size_t count = 0;

    inline static constexpr double kMeanDirectionFloor = 1e-14;
};

namespace detail {

// Single accumulation kernel so that the sample and measure routes agree bit
// for bit when the weights are 1/n.
template <typename WeightAt>
MomentSummary accumulate_moments(const Matrix& pts, WeightAt&& weight_at) {
    const Eigen::Index d = pts.rows();
    const Eigen::Index n = pts.cols();
    MomentSummary out;
    out.mean = Vector::Zero(d);
    out.scatter = Matrix::Zero(d, d);
    out.count = static_cast<std::size_t>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = weight_at(i);
        for (Eigen::Index r = 0; r < d; ++r) {
            const double wx = w * pts(r, i);
            out.mean[r] += wx;
            for (Eigen::Index c = r; c < d; ++c) out.scatter(r, c) += wx * pts(c, i);
        }
    }
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < r; ++c) out.scatter(r, c) = out.scatter(c, r);
    out.resultant_length = out.mean.norm();
    if (out.resultant_length >= MomentSummary::kMeanDirectionFloor)
        out.mean_direction = UnitVector::normalized(out.mean);
    return out;
}

}  // namespace detail

/// Mean, resultant length, mean direction and scatter of a sample.
inline MomentSummary moment_summary(const SampleSet& sample) {
    const double w = 1.0 / static_cast<double>(sample.size());
    return detail::accumulate_moments(sample.points(), [w](Eigen::Index) { return w; });
}

/// Weighted analogue of moment_summary.
inline MomentSummary measure_moments(const DiscreteMeasure& mu) {
    const Vector& w = mu.weights();
    return detail::accumulate_moments(mu.atoms().points(), [&w](Eigen::Index i) { return w[i]; });
}

/// ||M(mu) - I/d||_F. Zero exactly for probabilistic unit norm tight frames.
inline double moment_deviation(const DiscreteMeasure& mu) {
    const Matrix& t = measure_moments(mu).scatter;
    const auto d = t.rows();
    return (t - Matrix::Identity(d, d) / static_cast<double>(d)).norm();
}

}  // namespace dirstat
