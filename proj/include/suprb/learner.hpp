#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "composition.hpp"
#include "data.hpp"
#include "discovery.hpp"
#include "error.hpp"
#include "fitness.hpp"
#include "mixing.hpp"
#include "random.hpp"
#include "rule.hpp"

namespace suprb {

struct LearnerConfig {
    std::size_t n_iter = 32;
    ESConfig es;
    GAConfig ga;
    FitnessParams rule_fitness;
    FitnessParams solution_fitness;
    double ridge_coeff = 0.01;
    std::uint64_t seed = 0;
    std::size_t workers = 1; // threads for rule discovery; does not affect results

    void validate() const
    {
        if (n_iter < 1) throw InvalidArgument("n_iter must be >= 1");
        if (!(ridge_coeff >= 0.0)) throw InvalidArgument("ridge_coeff must be >= 0");
        es.validate();
        ga.validate();
        rule_fitness.validate();
        solution_fitness.validate();
    }
};

struct TrainedModel {
    Pool pool;
    SolutionIndividual elitist;
    TransformState transform;
    LearnerConfig config;
    std::vector<std::string> feature_names;
    std::string target_name;
    std::vector<double> elitist_history; // elitist fitness after each cycle

    std::vector<std::size_t> selected() const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < elitist.genome.size(); ++k) {
            if (elitist.genome[k]) out.push_back(k);
        }
        return out;
    }
};

// Seed of the solution-composition phase of cycle `cycle`.
inline std::uint64_t composition_stream(std::uint64_t master_seed, std::size_t cycle)
{
    return derive_seed({master_seed, 0x436f'6d70ULL, cycle});
}

// Alternates rule discovery and solution composition on already transformed
// data (features in [-1, 1], standardized target).
inline void fit_scaled(TrainedModel& model, const Matrix& X, const Vector& y)
{
    const LearnerConfig& cfg = model.config;
    PoolEvaluator evaluator(X, y);
    std::optional<SolutionIndividual> elitist;
    // trivial-model errors: the standardized mean predicts 0
    std::vector<double> errors(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) errors[static_cast<std::size_t>(i)] = y[i] * y[i];

    for (std::size_t cycle = 0; cycle < cfg.n_iter; ++cycle) {
        model.pool.append(discover_rules(errors, X, y, cfg.es, cfg.rule_fitness, cfg.ridge_coeff, cfg.seed, cycle,
                                         cfg.workers));
        evaluator.sync(model.pool);

        Rng rng(composition_stream(cfg.seed, cycle));
        elitist = compose_solution(evaluator, elitist, cfg.ga, cfg.solution_fitness, rng);
        model.elitist_history.push_back(elitist->fitness);

        const Vector pred = evaluator.predict(elitist->genome);
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double r = pred[i] - y[i];
            errors[static_cast<std::size_t>(i)] = r * r;
        }
    }
    model.elitist = std::move(*elitist);
}

inline TrainedModel fit(const Matrix& X_raw, const Vector& y_raw, const LearnerConfig& config)
{
    config.validate();
    validate_data(X_raw, y_raw);
    if (X_raw.rows() < 2) throw DataError("at least 2 training examples required");
    Transformed t = fit_transform(X_raw, y_raw);

    TrainedModel model;
    model.config = config;
    model.transform = t.state;
    fit_scaled(model, t.X, t.y);
    return model;
}

inline TrainedModel fit(const Dataset& train, const LearnerConfig& config)
{
    TrainedModel m = fit(train.X, train.y, config);
    m.feature_names = train.feature_names;
    m.target_name = train.target_name;
    return m;
}

namespace detail {

inline void check_model(const TrainedModel& model)
{
    if (model.pool.empty() || model.elitist.genome.size() != model.pool.size()) {
        throw StateError("model is not trained");
    }
}

} // namespace detail

// Predictions in standardized-target units for features already scaled.
inline Vector predict_scaled(const TrainedModel& model, const Matrix& X_scaled)
{
    detail::check_model(model);
    Vector out(X_scaled.rows());
    for (Eigen::Index r = 0; r < X_scaled.rows(); ++r) {
        out[r] = mix_prediction(model.pool, model.elitist.genome, X_scaled.row(r));
    }
    return out;
}

// Predictions in original target units.
inline Vector predict(const TrainedModel& model, const Matrix& X_raw)
{
    detail::check_model(model);
    if (X_raw.cols() != model.transform.dim()) {
        throw InvalidArgument("expected " + std::to_string(model.transform.dim()) + " features, got " +
                              std::to_string(X_raw.cols()));
    }
    return model.transform.unstandardize(predict_scaled(model, model.transform.scale_features(X_raw)));
}

} // namespace suprb
