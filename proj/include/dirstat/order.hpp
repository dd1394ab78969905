#pragma once

// Planar nematic order: the Q2 tensor, the order parameter and director, and
// a spatially local order field computed over disks around grid cells.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dirstat/core.hpp"
#include "dirstat/parallel.hpp"
#include "dirstat/uniformity.hpp"

namespace dirstat {

/// Reduces an axial angle into [0, pi).
inline double reduce_axial(double theta) {
    double r = std::fmod(theta, std::numbers::pi);
    if (r < 0.0) r += std::numbers::pi;
    if (r >= std::numbers::pi) r = 0.0;
    return r;
}

/// A rod: planar position and an axial orientation stored in [0, pi).
struct Rod {
    Rod(double x, double y, double theta) : position(x, y), orientation(reduce_axial(theta)) {}

    Eigen::Vector2d position;
    double orientation;
};

struct OrderResult {
    /// 2 T - I, symmetric and traceless.
    Matrix q2;
    /// Nonnegative eigenvalue of q2, in [0, 1].
    double order_parameter = 0.0;
    /// Eigenvector of the nonnegative eigenvalue, first nonzero component
    /// nonnegative. Absent in the isotropic state.
    std::optional<UnitVector> director;

    /// Director as an axial angle in [0, pi).
    std::optional<double> director_angle() const {
        if (!director) return std::nullopt;
        return reduce_axial(std::atan2((*director)[1], (*director)[0]));
    }
};

namespace detail {

inline void require_planar(const SampleSet& s, const char* who) {
    if (s.dim() != 2) throw_domain(std::string(who) + ": only d = 2 is supported");
}

}  // namespace detail

/// Q2 = (2/n) sum x_i x_i^T - I.
inline Matrix q2_matrix(const SampleSet& sample) {
    detail::require_planar(sample, "q2_matrix");
    return 2.0 * moment_summary(sample).scatter - Matrix::Identity(2, 2);
}

/// Order parameter and director from the eigen-decomposition of Q2.
inline OrderResult order_parameter(const SampleSet& sample) {
    OrderResult r;
    r.q2 = q2_matrix(sample);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r.q2);
    r.order_parameter = std::clamp(eig.eigenvalues()[1], 0.0, 1.0);
    if (r.order_parameter >= 1e-14) {
        Vector v = eig.eigenvectors().col(1);
        if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -v;
        r.director = UnitVector::normalized(v);
    }
    return r;
}

inline SampleSet rod_directions(const std::vector<Rod>& rods) {
    std::vector<double> angles;
    angles.reserve(rods.size());
    for (const auto& rod : rods) angles.push_back(rod.orientation);
    return SampleSet::from_angles(angles);
}

struct OrderCell {
    Eigen::Vector2d center;
    int count = 0;
    std::optional<double> order_parameter;
    std::optional<UnitVector> director;
};

struct OrderField {
    int nx = 0;
    int ny = 0;
    double cell_size = 0.0;
    double radius = 0.0;
    Eigen::Vector2d origin;
    /// Row-major: cell (ix, iy) at index iy * nx + ix.
    std::vector<OrderCell> cells;

    const OrderCell& at(int ix, int iy) const { return cells.at(static_cast<std::size_t>(iy * nx + ix)); }
};

struct FieldOptions {
    double radius = 1.0;
    double cell_size = 1.0;
    int min_count = 5;
    unsigned threads = 1;
};

/// Local order parameter on a regular lattice of cell centers covering the
/// rod bounding box. Each cell uses the rods within `radius` of its center;
/// cells with fewer than `min_count` rods are left empty.
inline OrderField local_order_field(const std::vector<Rod>& rods, const FieldOptions& opt) {
    if (rods.empty()) detail::throw_data("local_order_field: empty rod list");
    if (!(opt.radius > 0.0)) detail::throw_domain("local_order_field: radius must be positive");
    if (!(opt.cell_size > 0.0)) detail::throw_domain("local_order_field: cell_size must be positive");
    if (opt.min_count < 2) detail::throw_domain("local_order_field: min_count must be at least 2");

    Eigen::Vector2d lo = rods.front().position;
    Eigen::Vector2d hi = lo;
    for (const auto& r : rods) {
        lo = lo.cwiseMin(r.position);
        hi = hi.cwiseMax(r.position);
    }
    OrderField field;
    field.cell_size = opt.cell_size;
    field.radius = opt.radius;
    field.origin = lo;
    field.nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / opt.cell_size)));
    field.ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / opt.cell_size)));

    // Bin rods on a radius-sized grid so each query touches a 3x3 block.
    auto bin_of = [&](const Eigen::Vector2d& p) {
        return std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(std::floor((p.x() - lo.x()) / opt.radius)),
                                                      static_cast<std::int64_t>(std::floor((p.y() - lo.y()) / opt.radius))};
    };
    auto key = [](std::int64_t bx, std::int64_t by) { return (bx << 32) ^ (by & 0xffffffffLL); };
    std::unordered_map<std::int64_t, std::vector<std::size_t>> bins;
    for (std::size_t i = 0; i < rods.size(); ++i) {
        const auto [bx, by] = bin_of(rods[i].position);
        bins[key(bx, by)].push_back(i);
    }

    field.cells.resize(static_cast<std::size_t>(field.nx) * static_cast<std::size_t>(field.ny));
    const double r2 = opt.radius * opt.radius;
    detail::parallel_for(field.cells.size(), opt.threads, [&](std::size_t idx) {
        const int ix = static_cast<int>(idx % static_cast<std::size_t>(field.nx));
        const int iy = static_cast<int>(idx / static_cast<std::size_t>(field.nx));
        OrderCell& cell = field.cells[idx];
        cell.center = lo + opt.cell_size * Eigen::Vector2d(ix + 0.5, iy + 0.5);
        const auto [bx, by] = bin_of(cell.center);
        std::vector<std::size_t> members;
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = bins.find(key(bx + dx, by + dy));
                if (it == bins.end()) continue;
                for (std::size_t i : it->second)
                    if ((rods[i].position - cell.center).squaredNorm() <= r2) members.push_back(i);
            }
        // Fixed summation order regardless of bin traversal.
        std::sort(members.begin(), members.end());
        cell.count = static_cast<int>(members.size());
        if (cell.count < opt.min_count) return;
        std::vector<double> angles;
        angles.reserve(members.size());
        for (std::size_t i : members) angles.push_back(rods[i].orientation);
        const auto res = order_parameter(SampleSet::from_angles(angles));
        cell.order_parameter = res.order_parameter;
        cell.director = res.director;
    });
    return field;
}

struct OrderBingham {
    double q2_lambda = 0.0;
    double bingham_stat = 0.0;
};

/// Order parameter and Bingham statistic of the same planar sample. Both are
/// functions of the scatter matrix: bingham_stat = 2 n lambda^2.
inline OrderBingham fisher_vs_q2_bridge(const SampleSet& sample) {
    detail::require_planar(sample, "fisher_vs_q2_bridge");
    return OrderBingham{order_parameter(sample).order_parameter, bingham_test(sample).statistic};
}

}  // namespace dirstat
