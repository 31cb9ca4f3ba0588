#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "fitness.hpp"
#include "mixing.hpp"
#include "random.hpp"
#include "rule.hpp"

namespace suprb {

// Bit i selects pool rule i.
using Genome = std::vector<bool>;

inline std::size_t popcount(const Genome& g) { return static_cast<std::size_t>(std::count(g.begin(), g.end(), true)); }

struct SolutionIndividual {
    Genome genome;
    double fitness = 0.0;
    std::size_t complexity = 0;
    double in_sample_mse = 0.0;
};

struct GAConfig {
    std::size_t population_size = 32;
    std::size_t generations = 32;
    std::size_t n_elitists = 6;
    std::size_t crossover_points = 3;
    double crossover_probability = 0.9;
    std::optional<double> mutation_rate; // unset: 1 / pool size
    std::size_t tournament_size = 3;
    double init_density = 0.5;

    void validate() const
    {
        auto prob = [](double p, const char* name) {
            if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
        };
        if (population_size < 1) throw InvalidArgument("ga.population_size must be >= 1");
        if (n_elitists >= population_size) throw InvalidArgument("ga.n_elitists must be < ga.population_size");
        if (tournament_size < 1) throw InvalidArgument("ga.tournament_size must be >= 1");
        prob(crossover_probability, "ga.crossover_probability");
        prob(init_density, "ga.init_density");
        if (mutation_rate) prob(*mutation_rate, "ga.mutation_rate");
    }
};

// Caches, for every pool rule, the training rows it matches together with its
// outputs there, so a genome is scored without re-matching. Grows with the pool.
class PoolEvaluator {
public:
    PoolEvaluator(const Matrix& X, const Vector& y) : X_(&X), y_(&y) {}

    PoolEvaluator(const Pool& pool, const Matrix& X, const Vector& y) : PoolEvaluator(X, y) { sync(pool); }

    // Picks up rules appended to the pool since the last call.
    void sync(const Pool& pool)
    {
        pool_ = &pool;
        for (std::size_t k = entries_.size(); k < pool.size(); ++k) {
            const Rule& r = pool[k];
            Entry e;
            e.rows = match_set(r, *X_);
            e.outputs.reserve(e.rows.size());
            for (auto row : e.rows) e.outputs.push_back(predict_rule(r, X_->row(static_cast<Eigen::Index>(row))));
            e.weight = mixing_weight(r);
            entries_.push_back(std::move(e));
        }
    }

    std::size_t pool_size() const noexcept { return entries_.size(); }
    const Pool& pool() const { return *pool_; }
    const Matrix& X() const { return *X_; }
    const Vector& y() const { return *y_; }

    // Standardized predictions on the training set.
    Vector predict(const Genome& genome) const
    {
        check_genome(genome);
        const auto n = static_cast<std::size_t>(X_->rows());
        std::vector<double> num(n, 0.0), den(n, 0.0);
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            if (!genome[k]) continue;
            const Entry& e = entries_[k];
            for (std::size_t j = 0; j < e.rows.size(); ++j) {
                num[e.rows[j]] += e.weight * e.outputs[j];
                den[e.rows[j]] += e.weight;
            }
        }
        Vector out(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = den[i] > 0.0 ? num[i] / den[i] : 0.0;
        return out;
    }

    SolutionIndividual evaluate(Genome genome, const FitnessParams& params) const
    {
        const Vector pred = predict(genome);
        SolutionIndividual s;
        s.in_sample_mse = (pred - *y_).squaredNorm() / static_cast<double>(y_->size());
        s.complexity = popcount(genome);
        const auto obj = solution_objectives(s.in_sample_mse, s.complexity, entries_.size(), params.beta);
        s.fitness = combine(obj.accuracy, obj.size, params.alpha);
        s.genome = std::move(genome);
        return s;
    }

private:
    struct Entry {
        std::vector<std::size_t> rows;
        std::vector<double> outputs;
        double weight = 0.0;
    };

    void check_genome(const Genome& g) const
    {
        if (g.size() != entries_.size()) {
            throw InvalidArgument("genome length " + std::to_string(g.size()) + " does not match pool size " +
                                  std::to_string(entries_.size()));
        }
    }

    const Matrix* X_;
    const Vector* y_;
    const Pool* pool_ = nullptr;
    std::vector<Entry> entries_;
};

// Scores a genome from scratch.
inline SolutionIndividual evaluate_solution(const Genome& genome, const Pool& pool, const Matrix& X, const Vector& y,
                                            const FitnessParams& params)
{
    if (pool.empty()) throw InvalidArgument("evaluate_solution: empty pool");
    PoolEvaluator ev(pool, X, y);
    return ev.evaluate(genome, params);
}

// Strict ordering used for every selection: higher fitness, then lower
// complexity. Callers break remaining ties by position.
inline bool ranks_before(const SolutionIndividual& a, const SolutionIndividual& b) noexcept
{
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.complexity < b.complexity;
}

inline std::pair<std::size_t, std::size_t> tournament_select(const std::vector<SolutionIndividual>& population,
                                                             std::size_t tournament_size, Rng& rng)
{
    if (population.empty()) throw InvalidArgument("tournament_select: empty population");
    if (tournament_size < 1) throw InvalidArgument("tournament_select: tournament_size must be >= 1");
    auto one = [&] {
        std::size_t best = static_cast<std::size_t>(rng.below(population.size()));
        for (std::size_t t = 1; t < tournament_size; ++t) {
            const auto c = static_cast<std::size_t>(rng.below(population.size()));
            const auto& pc = population[c];
            const auto& pb = population[best];
            if (ranks_before(pc, pb) || (!ranks_before(pb, pc) && c < best)) best = c;
        }
        return best;
    };
    const std::size_t first = one();
    const std::size_t second = one();
    return {first, second};
}

// With probability `probability`, cuts both parents at `n` distinct positions
// and alternates segments starting with `a`; otherwise a copy of `a`.
inline Genome n_point_crossover(const Genome& a, const Genome& b, std::size_t n, double probability, Rng& rng)
{
    if (a.size() != b.size()) throw InvalidArgument("n_point_crossover: parents differ in length");
    if (n >= a.size()) {
        throw InvalidArgument("n_point_crossover: " + std::to_string(n) + " cut points need a genome longer than " +
                              std::to_string(a.size()));
    }
    if (!rng.bernoulli(probability) || n == 0) return a;

    // cut position c splits between bit c-1 and bit c, c in [1, len-1]
    std::vector<std::size_t> positions(a.size() - 1);
    std::iota(positions.begin(), positions.end(), std::size_t{1});
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(positions.size() - i));
        std::swap(positions[i], positions[j]);
    }
    std::vector<std::size_t> cuts(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(cuts.begin(), cuts.end());

    Genome child(a.size());
    bool from_a = true;
    std::size_t next_cut = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (next_cut < cuts.size() && i == cuts[next_cut]) {
            from_a = !from_a;
            ++next_cut;
        }
        child[i] = from_a ? a[i] : b[i];
    }
    return child;
}

inline Genome bitflip_mutate(Genome genome, double rate, Rng& rng)
{
    if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("bitflip_mutate: rate must lie in [0, 1]");
    for (std::size_t i = 0; i < genome.size(); ++i) {
        if (rng.bernoulli(rate)) genome[i] = !genome[i];
    }
    return genome;
}

namespace detail {

inline void rank_population(std::vector<SolutionIndividual>& pop)
{
    std::stable_sort(pop.begin(), pop.end(), ranks_before);
}

} // namespace detail

// Per-generation probe used by tests.
struct GaTrace {
    std::vector<double> best_fitness;
    std::vector<std::size_t> population_sizes;
};

// Generational GA over genomes of the evaluator's pool. The incoming elitist,
// zero-padded to the current pool length, competes with population_size random
// genomes; the best population_size of those seed the first generation.
inline SolutionIndividual compose_solution(const PoolEvaluator& evaluator, const std::optional<SolutionIndividual>& elitist,
                                           const GAConfig& config, const FitnessParams& fitness, Rng& rng,
                                           GaTrace* trace = nullptr)
{
    config.validate();
    const std::size_t length = evaluator.pool_size();
    if (length == 0) throw InvalidArgument("compose_solution: empty pool");
    const double rate = config.mutation_rate.value_or(1.0 / static_cast<double>(length));
    const std::size_t cut_points = std::min(config.crossover_points, length - 1);

    std::vector<SolutionIndividual> population;
    population.reserve(config.population_size + 1);
    if (elitist) {
        if (elitist->genome.size() > length) throw InvalidArgument("compose_solution: elitist longer than pool");
        Genome padded = elitist->genome;
        padded.resize(length, false);
        population.push_back(evaluator.evaluate(std::move(padded), fitness));
    }
    for (std::size_t i = 0; i < config.population_size; ++i) {
        Genome g(length);
        for (std::size_t b = 0; b < length; ++b) g[b] = rng.bernoulli(config.init_density);
        population.push_back(evaluator.evaluate(std::move(g), fitness));
    }
    detail::rank_population(population);
    population.resize(config.population_size);
    if (trace) {
        trace->best_fitness.push_back(population.front().fitness);
        trace->population_sizes.push_back(population.size());
    }

    const std::size_t n_children = config.population_size - config.n_elitists;
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        std::vector<SolutionIndividual> next(population.begin(),
                                             population.begin() + static_cast<std::ptrdiff_t>(config.n_elitists));
        next.reserve(config.population_size);
        for (std::size_t c = 0; c < n_children; ++c) {
            const auto [i, j] = tournament_select(population, config.tournament_size, rng);
            Genome child = n_point_crossover(population[i].genome, population[j].genome, cut_points,
                                             config.crossover_probability, rng);
            child = bitflip_mutate(std::move(child), rate, rng);
            next.push_back(evaluator.evaluate(std::move(child), fitness));
        }
        detail::rank_population(next);
        population = std::move(next);
        if (trace) {
            trace->best_fitness.push_back(population.front().fitness);
            trace->population_sizes.push_back(population.size());
        }
    }
    return population.front();
}

inline SolutionIndividual compose_solution(const Pool& pool, const std::optional<SolutionIndividual>& elitist,
                                           const Matrix& X, const Vector& y, const GAConfig& config,
                                           const FitnessParams& fitness, Rng& rng)
{
    PoolEvaluator ev(pool, X, y);
    return compose_solution(ev, elitist, config, fitness, rng);
}

} // namespace suprb
