#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "error.hpp"
#include "types.hpp"

namespace suprb {

// Weighting of a two-objective fitness. alpha trades the first objective
// against the second, beta is the slope of the pseudo-accuracy.
struct FitnessParams {
    double alpha = 0.05;
    double beta = 2.0;

    void validate() const
    {
        if (!(alpha > 0.0)) throw InvalidArgument("fitness alpha must be > 0, got " + std::to_string(alpha));
        if (!(beta > 0.0)) throw InvalidArgument("fitness beta must be > 0, got " + std::to_string(beta));
    }
};

// exp(-mse * beta), in (0, 1].
inline double pseudo_accuracy(double mse, double beta)
{
    if (mse < 0.0 || std::isnan(mse)) throw InvalidArgument("pseudo_accuracy: mse must be >= 0");
    if (!(beta > 0.0)) throw InvalidArgument("pseudo_accuracy: beta must be > 0");
    return std::exp(-mse * beta);
}

// Product over dimensions of interval width relative to the domain width.
inline double volume_share(const Vector& lower, const Vector& upper, const Vector& domain_width)
{
    if (lower.size() != upper.size() || lower.size() != domain_width.size()) {
        throw InvalidArgument("volume_share: dimension mismatch");
    }
    double v = 1.0;
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        const double w = upper[i] - lower[i];
        if (w < 0.0) throw InvalidArgument("volume_share: lower > upper in dimension " + std::to_string(i));
        if (!(domain_width[i] > 0.0)) throw InvalidArgument("volume_share: domain width must be > 0");
        if (w > domain_width[i]) throw InvalidArgument("volume_share: interval wider than domain in dimension " + std::to_string(i));
        v *= w / domain_width[i];
    }
    return v;
}

// Volume share in the scaled feature space, where every dimension spans [-1, 1].
inline double volume_share(const Vector& lower, const Vector& upper)
{
    return volume_share(lower, upper, Vector::Constant(lower.size(), 2.0));
}

// Weighted harmonic combination of two objectives in [0, 1].
inline double combine(double o1, double o2, double alpha)
{
    const double a2 = alpha * alpha;
    const double denom = a2 * o1 + o2;
    if (denom == 0.0) return 0.0;
    return (1.0 + a2) * o1 * o2 / denom;
}

struct Objectives {
    double accuracy;
    double size;
};

// Accuracy and size objectives of a rule subset: pseudo-accuracy of the
// in-sample error and 1 - complexity / pool_size.
inline Objectives solution_objectives(double in_sample_mse, std::size_t complexity, std::size_t pool_size, double beta)
{
    if (pool_size == 0) throw InvalidArgument("solution_objectives: pool_size must be >= 1");
    if (complexity > pool_size) {
        throw InvalidArgument("solution_objectives: complexity " + std::to_string(complexity) + " exceeds pool size " +
                              std::to_string(pool_size));
    }
    return {pseudo_accuracy(in_sample_mse, beta),
            1.0 - static_cast<double>(complexity) / static_cast<double>(pool_size)};
}

} // namespace suprb
