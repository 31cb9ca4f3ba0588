#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "random.hpp"
#include "types.hpp"

namespace suprb {

// Generating parameters of a synthetic piecewise-linear dataset: on
// [breakpoints[k], breakpoints[k+1]] the target is slopes[k] * x + intercepts[k].
struct PiecewiseLinearMeta {
    std::vector<double> breakpoints;
    std::vector<double> slopes;
    std::vector<double> intercepts;
    double noise_std = 0.0;
};

struct Dataset {
    std::string name;
    Matrix X; // original units, one example per row
    Vector y;
    std::vector<std::string> feature_names;
    std::string target_name;
    std::optional<PiecewiseLinearMeta> piecewise;

    std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

// Rejects NaN/Inf and shape inconsistencies.
inline void validate_data(const Matrix& X, const Vector& y)
{
    if (X.rows() != y.size()) throw DataError("feature rows and target length differ");
    if (X.cols() < 1) throw DataError("at least one feature column required");
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            if (!std::isfinite(X(r, c))) {
                throw DataError("non-finite feature value at row " + std::to_string(r) + ", column " + std::to_string(c));
            }
        }
        if (!std::isfinite(y[r])) throw DataError("non-finite target value at row " + std::to_string(r));
    }
}

inline Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows)
{
    Dataset out;
    out.name = data.name;
    out.feature_names = data.feature_names;
    out.target_name = data.target_name;
    out.piecewise = data.piecewise;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), data.X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(r);
        out.y[static_cast<Eigen::Index>(i)] = data.y[r];
    }
    return out;
}

// ---------------------------------------------------------------- CSV

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!trim(cur).empty()) throw DataError("malformed CSV: stray quote on line " + std::to_string(line_no));
            cur.clear();
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.emplace_back(was_quoted ? cur : std::string(trim(cur)));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw DataError("malformed CSV: unterminated quote on line " + std::to_string(line_no));
    fields.emplace_back(was_quoted ? cur : std::string(trim(cur)));
    return fields;
}

inline std::optional<double> parse_number(std::string_view s)
{
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

} // namespace detail

// Header plus numeric body of a CSV file.
struct Table {
    std::vector<std::string> header;
    Matrix values;
};

// Parses a headed, all-numeric CSV. Row numbers in diagnostics count the
// header as row 1; columns are 1-based.
inline Table parse_table(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    Table t;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
            t.header = detail::split_csv_line(line, line_no);
            break;
        }
    }
    if (t.header.empty()) throw DataError("empty CSV file");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line, line_no);
        if (fields.size() != t.header.size()) {
            throw DataError("malformed CSV: row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(t.header.size()));
        }
        std::vector<double> values(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto v = detail::parse_number(fields[c]);
            if (!v) {
                throw DataError("non-numeric value '" + fields[c] + "' at row " + std::to_string(line_no) + ", column " +
                                std::to_string(c + 1) + " ('" + t.header[c] + "')");
            }
            values[c] = *v;
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError("CSV has a header but no data rows");

    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return t;
}

// `target_column` names the target; empty selects the last column.
inline Dataset parse_csv(std::istream& in, const std::string& target_column = {}, const std::string& name = {})
{
    Table t = parse_table(in);
    if (t.header.size() < 2) throw DataError("CSV needs at least one feature column and a target column");
    std::size_t target = t.header.size() - 1;
    if (!target_column.empty()) {
        const auto it = std::find(t.header.begin(), t.header.end(), target_column);
        if (it == t.header.end()) throw DataError("target column '" + target_column + "' not found in header");
        target = static_cast<std::size_t>(it - t.header.begin());
    }

    Dataset ds;
    ds.name = name;
    ds.target_name = t.header[target];
    const Eigen::Index n = t.values.rows();
    ds.X.resize(n, static_cast<Eigen::Index>(t.header.size() - 1));
    ds.y = t.values.col(static_cast<Eigen::Index>(target));
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == target) continue;
        ds.feature_names.push_back(t.header[c]);
        ds.X.col(col++) = t.values.col(static_cast<Eigen::Index>(c));
    }
    return ds;
}

inline Dataset load_csv(const std::string& path, const std::string& target_column = {}, std::string name = {})
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path + "'");
    try {
        return parse_csv(in, target_column, name.empty() ? path : std::move(name));
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_csv(std::ostream& out, const Dataset& ds)
{
    std::ostringstream buf;
    buf.precision(17);
    for (const auto& f : ds.feature_names) buf << f << ',';
    buf << ds.target_name << '\n';
    for (Eigen::Index r = 0; r < ds.X.rows(); ++r) {
        for (Eigen::Index c = 0; c < ds.X.cols(); ++c) buf << ds.X(r, c) << ',';
        buf << ds.y[r] << '\n';
    }
    out << buf.str();
}

// ---------------------------------------------------------------- transforms

// Min-max scaling of features onto [-1, 1] and standardization of the target,
// both estimated on a training split.
struct TransformState {
    Vector feature_min;
    Vector feature_max;
    double target_mean = 0.0;
    double target_std = 1.0; // population standard deviation

    Eigen::Index dim() const noexcept { return feature_min.size(); }

    Matrix scale_features(const Matrix& X) const
    {
        if (X.cols() != dim()) {
            throw InvalidArgument("expected " + std::to_string(dim()) + " features, got " + std::to_string(X.cols()));
        }
        const Eigen::RowVectorXd range = (feature_max - feature_min).transpose();
        Matrix out = X.rowwise() - feature_min.transpose();
        out.array().rowwise() *= (2.0 / range.array());
        return out.array() - 1.0;
    }

    double scale_feature(Eigen::Index i, double v) const
    {
        return 2.0 * (v - feature_min[i]) / (feature_max[i] - feature_min[i]) - 1.0;
    }

    double unscale_feature(Eigen::Index i, double v) const
    {
        return (v + 1.0) * 0.5 * (feature_max[i] - feature_min[i]) + feature_min[i];
    }

    Vector standardize(const Vector& y) const { return (y.array() - target_mean) / target_std; }
    Vector unstandardize(const Vector& y) const { return y.array() * target_std + target_mean; }
    double unstandardize(double v) const { return v * target_std + target_mean; }
};

struct Transformed {
    TransformState state;
    Matrix X;
    Vector y;
};

inline Transformed fit_transform(const Matrix& X, const Vector& y)
{
    validate_data(X, y);
    if (X.rows() < 2) throw DataError("at least 2 training examples required");
    Transformed t;
    t.state.feature_min = X.colwise().minCoeff().transpose();
    t.state.feature_max = X.colwise().maxCoeff().transpose();
    for (Eigen::Index i = 0; i < X.cols(); ++i) {
        if (!(t.state.feature_max[i] > t.state.feature_min[i])) {
            throw DegenerateFeatureError("feature column " + std::to_string(i) + " is constant on the training split");
        }
    }
    t.state.target_mean = y.mean();
    t.state.target_std = std::sqrt((y.array() - t.state.target_mean).square().mean());
    if (!(t.state.target_std > 0.0)) throw DegenerateTargetError("target is constant on the training split");
    t.X = t.state.scale_features(X);
    t.y = t.state.standardize(y);
    return t;
}

inline Transformed fit_transform(const Dataset& train) { return fit_transform(train.X, train.y); }

// ---------------------------------------------------------------- splitting

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Uniformly random partition with round(test_fraction * n) test indices.
// Both index lists are returned in ascending order.
inline Split monte_carlo_split(std::size_t n, double test_fraction, std::uint64_t seed)
{
    if (n < 4) throw InvalidArgument("monte_carlo_split: at least 4 examples required");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("monte_carlo_split: test_fraction in (0, 1)");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(idx[i], idx[static_cast<std::size_t>(rng.below(i + 1))]);
    }
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 2);
    Split s;
    s.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

// ---------------------------------------------------------------- synthetic data

// Continuous piecewise-linear target over x ~ U[0, 1] with `segments` equal
// pieces. Slopes alternate in sign with magnitudes in [1, 3], plus Gaussian noise.
inline Dataset gen_piecewise_linear(std::size_t n, std::size_t segments, double noise_std, std::uint64_t seed)
{
    if (segments < 1) throw InvalidArgument("gen_piecewise_linear: segments must be >= 1");
    if (n < 2) throw InvalidArgument("gen_piecewise_linear: n must be >= 2");
    if (noise_std < 0.0) throw InvalidArgument("gen_piecewise_linear: noise_std must be >= 0");
    Rng rng(seed);

    PiecewiseLinearMeta meta;
    meta.noise_std = noise_std;
    double level = 0.0;
    for (std::size_t k = 0; k <= segments; ++k) meta.breakpoints.push_back(static_cast<double>(k) / static_cast<double>(segments));
    for (std::size_t k = 0; k < segments; ++k) {
        const double magnitude = 1.0 + 2.0 * rng.uniform();
        const double slope = (k % 2 == 0) ? magnitude : -magnitude;
        const double x0 = meta.breakpoints[k];
        meta.slopes.push_back(slope);
        meta.intercepts.push_back(level - slope * x0);
        level += slope * (meta.breakpoints[k + 1] - x0);
    }

    Dataset ds;
    ds.name = "piecewise_linear_" + std::to_string(segments);
    ds.feature_names = {"x"};
    ds.target_name = "y";
    ds.X.resize(static_cast<Eigen::Index>(n), 1);
    ds.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform();
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(x * static_cast<double>(segments)), segments - 1);
        double y = meta.slopes[k] * x + meta.intercepts[k];
        if (noise_std > 0.0) y += noise_std * rng.normal();
        ds.X(static_cast<Eigen::Index>(i), 0) = x;
        ds.y[static_cast<Eigen::Index>(i)] = y;
    }
    ds.piecewise = std::move(meta);
    return ds;
}

} // namespace suprb
