#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "fitness.hpp"
#include "types.hpp"

namespace suprb {

// Closed per-dimension intervals [lower_i, upper_i] in scaled feature units.
struct Bounds {
    Vector lower;
    Vector upper;

    Eigen::Index dim() const noexcept { return lower.size(); }

    bool operator==(const Bounds& other) const
    {
        return lower.size() == other.lower.size() && lower == other.lower && upper == other.upper;
    }
};

// Interval condition plus a linear submodel fitted on the examples it matches.
// Coefficients and intercept live in standardized-target units.
struct Rule {
    Bounds bounds;
    Vector coefficients;
    double intercept = 0.0;
    double in_sample_mse = 0.0;
    std::size_t experience = 0;
    double volume = 0.0;
    double fitness = 0.0;

    bool is_fitted() const noexcept { return experience > 0 && coefficients.size() == bounds.dim(); }
};

// Append-only archive of discovered rules. Indices are permanent and are what
// solution genomes refer to.
class Pool {
public:
    Pool() = default;

    void append(Rule rule) { rules_.push_back(std::move(rule)); }

    void append(std::vector<Rule> rules)
    {
        rules_.reserve(rules_.size() + rules.size());
        for (auto& r : rules) rules_.push_back(std::move(r));
    }

    std::size_t size() const noexcept { return rules_.size(); }
    bool empty() const noexcept { return rules_.empty(); }
    const Rule& operator[](std::size_t i) const { return rules_[i]; }
    const Rule& at(std::size_t i) const { return rules_.at(i); }
    std::span<const Rule> rules() const noexcept { return rules_; }
    auto begin() const noexcept { return rules_.cbegin(); }
    auto end() const noexcept { return rules_.cend(); }

private:
    std::vector<Rule> rules_;
};

namespace detail {

inline void check_dim(Eigen::Index expected, Eigen::Index got, const char* what)
{
    if (expected != got) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch (expected " + std::to_string(expected) + ", got " +
                              std::to_string(got) + ")");
    }
}

} // namespace detail

template <typename Derived>
bool matches(const Bounds& bounds, const Eigen::MatrixBase<Derived>& x)
{
    detail::check_dim(bounds.dim(), x.size(), "matches");
    for (Eigen::Index i = 0; i < bounds.dim(); ++i) {
        const double v = x(i);
        if (v < bounds.lower[i] || v > bounds.upper[i]) return false;
    }
    return true;
}

template <typename Derived>
bool matches(const Rule& rule, const Eigen::MatrixBase<Derived>& x)
{
    return matches(rule.bounds, x);
}

// Row indices of X inside the bounds, ascending.
inline std::vector<std::size_t> match_set(const Bounds& bounds, const Matrix& X)
{
    detail::check_dim(bounds.dim(), X.cols(), "match_set");
    std::vector<std::size_t> out;
    const Eigen::Index d = X.cols();
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        bool inside = true;
        for (Eigen::Index i = 0; i < d; ++i) {
            const double v = X(r, i);
            if (v < bounds.lower[i] || v > bounds.upper[i]) {
                inside = false;
                break;
            }
        }
        if (inside) out.push_back(static_cast<std::size_t>(r));
    }
    return out;
}

inline std::vector<std::size_t> match_set(const Rule& rule, const Matrix& X) { return match_set(rule.bounds, X); }

// Ridge fit of y ~ X w + b on the given rows. The intercept is not penalized;
// with ridge_coeff == 0 the minimum-norm least-squares solution is returned.
inline void fit_linear(const Matrix& X, const Vector& y, std::span<const std::size_t> rows, double ridge_coeff,
                       Vector& coefficients, double& intercept, double& mse)
{
    const auto m = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index d = X.cols();
    Matrix Xm(m, d);
    Vector ym(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        Xm.row(r) = X.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]));
        ym[r] = y[static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)])];
    }
    const Eigen::RowVectorXd x_mean = Xm.colwise().mean();
    const double y_mean = ym.mean();
    const Matrix Xc = Xm.rowwise() - x_mean;
    const Vector yc = ym.array() - y_mean;

    if (ridge_coeff > 0.0) {
        Matrix gram = Xc.transpose() * Xc;
        gram.diagonal().array() += ridge_coeff;
        coefficients = gram.ldlt().solve(Xc.transpose() * yc);
    } else {
        coefficients = Xc.completeOrthogonalDecomposition().solve(yc);
    }
    intercept = y_mean - x_mean.dot(coefficients);
    mse = ((Xm * coefficients).array() + intercept - ym.array()).square().mean();
}

// Fits the linear submodel of a rule with the given bounds on the training
// examples it matches. Fitness is left at 0; see rule_fitness.
inline Rule fit_submodel(const Bounds& bounds, const Matrix& X, const Vector& y, double ridge_coeff)
{
    if (ridge_coeff < 0.0) throw InvalidArgument("fit_submodel: ridge_coeff must be >= 0");
    if (X.rows() != y.size()) throw InvalidArgument("fit_submodel: X and y row counts differ");
    const auto rows = match_set(bounds, X);
    if (rows.empty()) throw EmptyMatchError("fit_submodel: rule matches no training example");

    Rule rule;
    rule.bounds = bounds;
    fit_linear(X, y, rows, ridge_coeff, rule.coefficients, rule.intercept, rule.in_sample_mse);
    rule.experience = rows.size();
    rule.volume = volume_share(bounds.lower, bounds.upper);
    return rule;
}

inline double rule_fitness(const Rule& rule, const FitnessParams& params)
{
    if (!rule.is_fitted()) throw StateError("rule_fitness: rule has not been fitted");
    return combine(pseudo_accuracy(rule.in_sample_mse, params.beta), rule.volume, params.alpha);
}

template <typename Derived>
double predict_rule(const Rule& rule, const Eigen::MatrixBase<Derived>& x)
{
    detail::check_dim(rule.coefficients.size(), x.size(), "predict_rule");
    return rule.coefficients.dot(x) + rule.intercept;
}

} // namespace suprb
