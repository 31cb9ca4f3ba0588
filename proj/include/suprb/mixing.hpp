#pragma once

#include <cstddef>
#include <vector>

#include "rule.hpp"

namespace suprb {

inline constexpr double kMixingEpsilon = 1e-6;

// Weight of a matching rule in the prediction: experience / (in-sample error + eps).
inline double mixing_weight(const Rule& rule) noexcept
{
    return static_cast<double>(rule.experience) / (rule.in_sample_mse + kMixingEpsilon);
}

// Standardized-space prediction of the selected rules for one input: the
// weight-normalized mean of the matching rules' outputs, or 0 (the training
// mean) when none match.
template <typename Derived>
double mix_prediction(const Pool& pool, const std::vector<bool>& genome, const Eigen::MatrixBase<Derived>& x)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        if (!genome[k]) continue;
        const Rule& r = pool[k];
        if (!matches(r, x)) continue;
        const double w = mixing_weight(r);
        num += w * predict_rule(r, x);
        den += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

} // namespace suprb
