#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"
#include "fitness.hpp"
#include "random.hpp"
#include "rule.hpp"

namespace suprb {

// Settings of the (1,lambda)-ES used to discover each new rule.
struct ESConfig {
    std::size_t lambda = 20;
    std::size_t delta = 8;        // generations without candidate improvement before stopping
    std::size_t n_rules = 4;      // rules discovered per cycle
    double mutation_spread = 0.1; // halfnormal scale of bound expansion
    double init_spread = 0.05;    // halfnormal scale of initial half-widths

    void validate() const
    {
        if (lambda < 1) throw InvalidArgument("es.lambda must be >= 1");
        if (delta < 1) throw InvalidArgument("es.delta must be >= 1");
        if (n_rules < 1) throw InvalidArgument("es.n_rules must be >= 1");
        if (!(mutation_spread > 0.0)) throw InvalidArgument("es.mutation_spread must be > 0");
        if (!(init_spread > 0.0)) throw InvalidArgument("es.init_spread must be > 0");
    }
};

// Roulette-wheel choice of a training example, proportional to its error.
// Falls back to a uniform draw when every error is zero.
inline std::size_t select_seed_example(std::span<const double> errors, Rng& rng)
{
    if (errors.empty()) throw InvalidArgument("select_seed_example: no examples");
    double total = 0.0;
    for (double e : errors) {
        if (e < 0.0 || !std::isfinite(e)) throw InvalidArgument("select_seed_example: errors must be finite and >= 0");
        total += e;
    }
    if (total == 0.0) return static_cast<std::size_t>(rng.below(errors.size()));

    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i] == 0.0) continue;
        acc += errors[i];
        last_positive = i;
        if (target < acc) return i;
    }
    // rounding can leave target == total
    return last_positive;
}

// Moves every lower bound down and every upper bound up by independent
// halfnormal draws, then clips to the scaled domain [-1, 1].
inline Bounds mutate(const Bounds& parent, double mutation_spread, Rng& rng)
{
    Bounds child = parent;
    for (Eigen::Index i = 0; i < parent.dim(); ++i) {
        child.lower[i] = std::max(parent.lower[i] - rng.halfnormal(mutation_spread), -1.0);
        child.upper[i] = std::min(parent.upper[i] + rng.halfnormal(mutation_spread), 1.0);
    }
    return child;
}

namespace detail {

inline Rule fit_scored(const Bounds& bounds, const Matrix& X, const Vector& y, double ridge_coeff,
                       const FitnessParams& fitness)
{
    Rule r = fit_submodel(bounds, X, y, ridge_coeff);
    r.fitness = rule_fitness(r, fitness);
    return r;
}

} // namespace detail

// Places a rule around the seed example with halfnormal half-widths and fits it.
template <typename Derived>
Rule init_rule(const Eigen::MatrixBase<Derived>& seed_example, double init_spread, Rng& rng, const Matrix& X,
               const Vector& y, double ridge_coeff, const FitnessParams& fitness)
{
    const Eigen::Index d = seed_example.size();
    Bounds b{Vector(d), Vector(d)};
    for (Eigen::Index i = 0; i < d; ++i) {
        const double x = seed_example(i);
        b.lower[i] = std::max(x - rng.halfnormal(init_spread), -1.0);
        b.upper[i] = std::min(x + rng.halfnormal(init_spread), 1.0);
        // keep the seed matched when it lies outside the domain box
        b.lower[i] = std::min(b.lower[i], x);
        b.upper[i] = std::max(b.upper[i], x);
    }
    return detail::fit_scored(b, X, y, ridge_coeff, fitness);
}

// Optional per-generation probe used by tests to observe an ES run.
struct EsTrace {
    std::vector<double> candidate_fitness;
    double initial_fitness = 0.0;
};

// One independent (1,lambda)-ES run.
inline Rule evolve_rule(std::span<const double> example_errors, const Matrix& X, const Vector& y, const ESConfig& config,
                        const FitnessParams& fitness, double ridge_coeff, Rng& rng, EsTrace* trace = nullptr)
{
    const std::size_t seed_index = select_seed_example(example_errors, rng);
    Rule candidate = init_rule(X.row(static_cast<Eigen::Index>(seed_index)), config.init_spread, rng, X, y, ridge_coeff,
                               fitness);
    Rule proponent = candidate;
    if (trace) trace->initial_fitness = candidate.fitness;

    std::size_t stall = 0;
    while (stall < config.delta) {
        std::optional<Rule> best_child;
        for (std::size_t k = 0; k < config.lambda; ++k) {
            const Bounds child_bounds = mutate(proponent.bounds, config.mutation_spread, rng);
            try {
                Rule child = detail::fit_scored(child_bounds, X, y, ridge_coeff, fitness);
                if (!best_child || child.fitness > best_child->fitness) best_child = std::move(child);
            } catch (const EmptyMatchError&) {
                // invalid child, fitness 0, never preferred over a valid sibling
            }
        }
        if (best_child) proponent = std::move(*best_child);

        if (candidate.fitness < proponent.fitness) {
            candidate = proponent;
            stall = 0;
        } else {
            ++stall;
        }
        if (trace) trace->candidate_fitness.push_back(candidate.fitness);
    }
    return candidate;
}

// Seed of the ES run that discovers rule `rule_index` in cycle `cycle`.
inline std::uint64_t discovery_stream(std::uint64_t master_seed, std::size_t cycle, std::size_t rule_index)
{
    return derive_seed({master_seed, 0x5275'6c65ULL, cycle, rule_index});
}

// Runs n_rules independent ES runs. Each run draws from its own stream, so the
// result does not depend on `workers`.
inline std::vector<Rule> discover_rules(std::span<const double> example_errors, const Matrix& X, const Vector& y,
                                        const ESConfig& config, const FitnessParams& fitness, double ridge_coeff,
                                        std::uint64_t master_seed, std::size_t cycle, std::size_t workers = 1)
{
    config.validate();
    if (X.rows() == 0) throw InvalidArgument("discover_rules: empty training data");
    if (static_cast<Eigen::Index>(example_errors.size()) != X.rows()) {
        throw InvalidArgument("discover_rules: one error per training example required");
    }

    std::vector<std::optional<Rule>> out(config.n_rules);
    auto run = [&](std::size_t i) {
        Rng rng(discovery_stream(master_seed, cycle, i));
        out[i] = evolve_rule(example_errors, X, y, config, fitness, ridge_coeff, rng);
    };

    workers = std::clamp<std::size_t>(workers, 1, config.n_rules);
    if (workers == 1) {
        for (std::size_t i = 0; i < config.n_rules; ++i) run(i);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < config.n_rules; i += workers) run(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::vector<Rule> rules;
    rules.reserve(out.size());
    for (auto& r : out) rules.push_back(std::move(*r));
    return rules;
}

} // namespace suprb
