#pragma once

// CSV ingestion and emission.
//
// Sample files carry a header row and either a single `theta` column (radians)
// or d columns `x1..xd`. Lines starting with '#' are comments. Rod files carry
// the columns x, y, theta in any order. Numbers are written with 12
// significant digits.

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dirstat/core.hpp"
#include "dirstat/order.hpp"

namespace dirstat::io {

/// 12 significant digits, shortest form ("%.12g").
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    std::string tmp(s);
    char* end = nullptr;
    errno = 0;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size() && errno != ERANGE && std::isfinite(out);
}

inline bool is_skippable(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<int> line_numbers;
};

// Reads a header and numeric rows. Bad rows are collected and reported
// together with their line numbers.
inline Table read_table(std::istream& in, const std::string& source) {
    Table t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::vector<int> bad;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_skippable(line)) continue;
        const auto fields = split(line);
        if (!have_header) {
            for (auto f : fields) t.header.emplace_back(f);
            have_header = true;
            continue;
        }
        std::vector<double> row(fields.size());
        bool ok = fields.size() == t.header.size();
        for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = parse_double(fields[i], row[i]);
        if (!ok) {
            bad.push_back(lineno);
            continue;
        }
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header) dirstat::detail::throw_data(source + ": missing header row");
    if (!bad.empty()) {
        std::string msg = source + ": malformed rows at lines";
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i) msg += " " + std::to_string(bad[i]);
        if (bad.size() > 20) msg += " ... (" + std::to_string(bad.size()) + " total)";
        dirstat::detail::throw_data(msg);
    }
    return t;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) dirstat::detail::throw_data("cannot open " + path);
    return in;
}

}  // namespace detail

struct SampleReadOptions {
    /// Interpret a theta column in degrees.
    bool degrees = false;
    double norm_tolerance = kIngestNormTolerance;
};

/// Parses a sample CSV (theta or x1..xd columns).
inline SampleSet read_samples(std::istream& in, const SampleReadOptions& opt = {}, const std::string& source = "input") {
    const auto table = detail::read_table(in, source);
    const auto& h = table.header;
    if (table.rows.empty()) dirstat::detail::throw_data(source + ": no data rows");
    if (h.size() == 1 && h[0] == "theta") {
        std::vector<double> angles;
        angles.reserve(table.rows.size());
        const double scale = opt.degrees ? std::numbers::pi / 180.0 : 1.0;
        for (const auto& row : table.rows) angles.push_back(row[0] * scale);
        return SampleSet::from_angles(angles);
    }
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h[i] != "x" + std::to_string(i + 1))
            dirstat::detail::throw_data(source + ": expected header 'theta' or 'x1,...,xd', got column '" + h[i] + "'");
    const auto d = static_cast<Eigen::Index>(h.size());
    Matrix pts(d, static_cast<Eigen::Index>(table.rows.size()));
    std::vector<int> bad;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const Eigen::Map<const Vector> v(table.rows[r].data(), d);
        if (!(std::abs(v.norm() - 1.0) <= opt.norm_tolerance)) bad.push_back(table.line_numbers[r]);
        pts.col(static_cast<Eigen::Index>(r)) = v;
    }
    if (!bad.empty()) {
        std::string msg = source + ": rows not of unit norm at lines";
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i) msg += " " + std::to_string(bad[i]);
        dirstat::detail::throw_data(msg);
    }
    return SampleSet::from_unit_columns(pts, opt.norm_tolerance);
}

inline SampleSet read_samples_file(const std::string& path, const SampleReadOptions& opt = {}) {
    auto in = detail::open_input(path);
    return read_samples(in, opt, path);
}

/// Parses a rod CSV with columns x, y, theta (radians unless `degrees`).
inline std::vector<Rod> read_rods(std::istream& in, bool degrees = false, const std::string& source = "input") {
    const auto table = detail::read_table(in, source);
    int cx = -1;
    int cy = -1;
    int ct = -1;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        const auto& name = table.header[i];
        if (name == "x") cx = static_cast<int>(i);
        if (name == "y") cy = static_cast<int>(i);
        if (name == "theta") ct = static_cast<int>(i);
    }
    if (cx < 0) dirstat::detail::throw_data(source + ": missing column 'x'");
    if (cy < 0) dirstat::detail::throw_data(source + ": missing column 'y'");
    if (ct < 0) dirstat::detail::throw_data(source + ": missing column 'theta'");
    if (table.rows.empty()) dirstat::detail::throw_data(source + ": no data rows");
    const double scale = degrees ? std::numbers::pi / 180.0 : 1.0;
    std::vector<Rod> rods;
    rods.reserve(table.rows.size());
    for (const auto& row : table.rows)
        rods.emplace_back(row[static_cast<std::size_t>(cx)], row[static_cast<std::size_t>(cy)],
                          row[static_cast<std::size_t>(ct)] * scale);
    return rods;
}

inline std::vector<Rod> read_rods_file(const std::string& path, bool degrees = false) {
    auto in = detail::open_input(path);
    return read_rods(in, degrees, path);
}

/// Text of one point as written to a sample file.
inline std::string format_point(const Eigen::Ref<const Vector>& point) {
    std::string s;
    for (Eigen::Index r = 0; r < point.size(); ++r) {
        if (r) s += ',';
        s += format_number(point[r]);
    }
    return s;
}

inline void write_samples(std::ostream& out, const SampleSet& sample) {
    for (int r = 0; r < sample.dim(); ++r) out << (r ? "," : "") << 'x' << (r + 1);
    out << '\n';
    for (std::size_t i = 0; i < sample.size(); ++i) out << format_point(sample.point(i)) << '\n';
}

inline void write_samples_file(const std::string& path, const SampleSet& sample) {
    std::ofstream out(path);
    if (!out) dirstat::detail::throw_data("cannot write " + path);
    write_samples(out, sample);
}

}  // namespace dirstat::io
