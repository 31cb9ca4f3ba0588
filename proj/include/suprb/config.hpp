#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "evaluation.hpp"
#include "learner.hpp"

namespace suprb {

using json = nlohmann::ordered_json;

struct DatasetEntry {
    std::string name;
    std::string path;
    std::string target; // empty: last column
};

// Everything a command line run can be configured with. Precedence:
// built-in defaults < config file < command-line flags.
struct CliConfig {
    LearnerConfig learner;
    BenchmarkSettings benchmark;
    std::vector<DatasetEntry> datasets;
};

// ---------------------------------------------------------------- to JSON

inline json to_json(const LearnerConfig& c)
{
    return {
        {"n_iter", c.n_iter},
        {"ridge_coeff", c.ridge_coeff},
        {"seed", c.seed},
        {"workers", c.workers},
        {"es",
         {{"lambda", c.es.lambda},
          {"delta", c.es.delta},
          {"n_rules", c.es.n_rules},
          {"mutation_spread", c.es.mutation_spread},
          {"init_spread", c.es.init_spread}}},
        {"ga",
         {{"population_size", c.ga.population_size},
          {"generations", c.ga.generations},
          {"n_elitists", c.ga.n_elitists},
          {"crossover_points", c.ga.crossover_points},
          {"crossover_probability", c.ga.crossover_probability},
          {"mutation_rate", c.ga.mutation_rate ? json(*c.ga.mutation_rate) : json(nullptr)},
          {"tournament_size", c.ga.tournament_size},
          {"init_density", c.ga.init_density}}},
        {"rule_fitness", {{"alpha", c.rule_fitness.alpha}, {"beta", c.rule_fitness.beta}}},
        {"solution_fitness", {{"alpha", c.solution_fitness.alpha}, {"beta", c.solution_fitness.beta}}},
    };
}

inline json to_json(const BenchmarkSettings& b)
{
    return {{"n_seeds", b.n_seeds}, {"n_splits", b.n_splits}, {"test_fraction", b.test_fraction}, {"seed", b.seed},
            {"jobs", b.jobs}};
}

inline json to_json(const CliConfig& c)
{
    json ds = json::array();
    for (const auto& d : c.datasets) ds.push_back({{"name", d.name}, {"path", d.path}, {"target", d.target}});
    return {{"learner", to_json(c.learner)}, {"benchmark", to_json(c.benchmark)}, {"datasets", ds}};
}

// One line of documentation per config key, in the order keys appear in the file.
inline const std::vector<std::pair<std::string, std::string>>& config_key_docs()
{
    static const std::vector<std::pair<std::string, std::string>> docs = {
        {"learner.n_iter", "alternating discovery/composition cycles"},
        {"learner.ridge_coeff", "l2 penalty of rule submodels (standardized space)"},
        {"learner.seed", "master seed of a fit (benchmark runs derive their own)"},
        {"learner.workers", "threads used for rule discovery"},
        {"learner.es.lambda", "children per ES generation"},
        {"learner.es.delta", "generations without improvement before an ES run stops"},
        {"learner.es.n_rules", "rules discovered per cycle"},
        {"learner.es.mutation_spread", "halfnormal scale of bound expansion"},
        {"learner.es.init_spread", "halfnormal scale of initial interval half-widths"},
        {"learner.ga.population_size", "GA population size"},
        {"learner.ga.generations", "GA generations per cycle"},
        {"learner.ga.n_elitists", "individuals carried over unchanged each generation"},
        {"learner.ga.crossover_points", "cut points of n-point crossover"},
        {"learner.ga.crossover_probability", "probability that crossover is applied"},
        {"learner.ga.mutation_rate", "per-bit flip probability; null means 1/pool size"},
        {"learner.ga.tournament_size", "individuals per tournament"},
        {"learner.ga.init_density", "probability of a set bit in random initial genomes"},
        {"learner.rule_fitness.alpha", "weight of error against volume in rule fitness"},
        {"learner.rule_fitness.beta", "pseudo-accuracy slope in rule fitness"},
        {"learner.solution_fitness.alpha", "weight of error against size in solution fitness"},
        {"learner.solution_fitness.beta", "pseudo-accuracy slope in solution fitness"},
        {"benchmark.n_seeds", "learner seeds per split"},
        {"benchmark.n_splits", "Monte Carlo train/test splits"},
        {"benchmark.test_fraction", "share of examples held out per split"},
        {"benchmark.seed", "benchmark master seed"},
        {"benchmark.jobs", "parallel benchmark runs"},
        {"datasets", "list of {name, path, target}; relative paths resolve against the file's directory"},
    };
    return docs;
}

// "key = default  # doc" lines for every config key.
inline std::string describe_config_keys()
{
    const json defaults = to_json(CliConfig{});
    std::ostringstream out;
    for (const auto& [key, doc] : config_key_docs()) {
        const json* node = &defaults;
        std::string_view rest = key;
        while (!rest.empty()) {
            const auto dot = rest.find('.');
            node = &(*node)[std::string(rest.substr(0, dot))];
            rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
        }
        out << "  " << key << " = " << node->dump() << "  # " << doc << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------- merging

// Copies `overlay` into `base`. Every key of `overlay` must already exist in
// `base`; scalars and arrays replace, objects recurse.
inline void merge_strict(json& base, const json& overlay, const std::string& prefix = {})
{
    if (!overlay.is_object()) {
        throw ConfigError(prefix.empty() ? "config must be a JSON object" : "config key '" + prefix + "' must be an object");
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
        json& target = base[it.key()];
        if (target.is_object()) {
            merge_strict(target, it.value(), key);
        } else {
            target = it.value();
        }
    }
}

// Applies "dotted.key=value". The value is read as JSON when it parses, else
// as a plain string.
inline void apply_override(json& doc, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &doc;
    std::string_view rest = key;
    while (true) {
        const auto dot = rest.find('.');
        const std::string part(rest.substr(0, dot));
        if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
        node = &(*node)[part];
        if (dot == std::string_view::npos) break;
        rest = rest.substr(dot + 1);
    }
    if (node->is_object()) throw ConfigError("config key '" + key + "' is a section, not a value");
    *node = std::move(value);
}

// ---------------------------------------------------------------- from JSON

namespace detail {

template <typename T>
T config_get(const json& node, const std::string& key)
{
    try {
        if constexpr (std::is_unsigned_v<T>) {
            if (!node.is_number_unsigned()) throw ConfigError("config key '" + key + "' must be a non-negative integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!node.is_number()) throw ConfigError("config key '" + key + "' must be a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!node.is_string()) throw ConfigError("config key '" + key + "' must be a string");
        }
        return node.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

} // namespace detail

inline LearnerConfig learner_from_json(const json& j, const std::string& p = "learner")
{
    json merged = to_json(LearnerConfig{});
    merge_strict(merged, j, p);
    using detail::config_get;
    LearnerConfig c;
    c.n_iter = config_get<std::size_t>(merged["n_iter"], p + ".n_iter");
    c.ridge_coeff = config_get<double>(merged["ridge_coeff"], p + ".ridge_coeff");
    c.seed = config_get<std::uint64_t>(merged["seed"], p + ".seed");
    c.workers = config_get<std::size_t>(merged["workers"], p + ".workers");
    const json& es = merged["es"];
    c.es.lambda = config_get<std::size_t>(es["lambda"], p + ".es.lambda");
    c.es.delta = config_get<std::size_t>(es["delta"], p + ".es.delta");
    c.es.n_rules = config_get<std::size_t>(es["n_rules"], p + ".es.n_rules");
    c.es.mutation_spread = config_get<double>(es["mutation_spread"], p + ".es.mutation_spread");
    c.es.init_spread = config_get<double>(es["init_spread"], p + ".es.init_spread");
    const json& ga = merged["ga"];
    c.ga.population_size = config_get<std::size_t>(ga["population_size"], p + ".ga.population_size");
    c.ga.generations = config_get<std::size_t>(ga["generations"], p + ".ga.generations");
    c.ga.n_elitists = config_get<std::size_t>(ga["n_elitists"], p + ".ga.n_elitists");
    c.ga.crossover_points = config_get<std::size_t>(ga["crossover_points"], p + ".ga.crossover_points");
    c.ga.crossover_probability = config_get<double>(ga["crossover_probability"], p + ".ga.crossover_probability");
    if (!ga["mutation_rate"].is_null()) {
        c.ga.mutation_rate = config_get<double>(ga["mutation_rate"], p + ".ga.mutation_rate");
    }
    c.ga.tournament_size = config_get<std::size_t>(ga["tournament_size"], p + ".ga.tournament_size");
    c.ga.init_density = config_get<double>(ga["init_density"], p + ".ga.init_density");
    c.rule_fitness.alpha = config_get<double>(merged["rule_fitness"]["alpha"], p + ".rule_fitness.alpha");
    c.rule_fitness.beta = config_get<double>(merged["rule_fitness"]["beta"], p + ".rule_fitness.beta");
    c.solution_fitness.alpha = config_get<double>(merged["solution_fitness"]["alpha"], p + ".solution_fitness.alpha");
    c.solution_fitness.beta = config_get<double>(merged["solution_fitness"]["beta"], p + ".solution_fitness.beta");
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline CliConfig config_from_json(const json& j)
{
    json merged = to_json(CliConfig{});
    merge_strict(merged, j);
    using detail::config_get;
    CliConfig c;
    c.learner = learner_from_json(merged["learner"]);
    const json& b = merged["benchmark"];
    c.benchmark.n_seeds = config_get<std::size_t>(b["n_seeds"], "benchmark.n_seeds");
    c.benchmark.n_splits = config_get<std::size_t>(b["n_splits"], "benchmark.n_splits");
    c.benchmark.test_fraction = config_get<double>(b["test_fraction"], "benchmark.test_fraction");
    c.benchmark.seed = config_get<std::uint64_t>(b["seed"], "benchmark.seed");
    c.benchmark.jobs = config_get<std::size_t>(b["jobs"], "benchmark.jobs");
    if (c.benchmark.n_seeds < 1 || c.benchmark.n_splits < 1) throw ConfigError("benchmark needs >= 1 seed and split");
    if (!(c.benchmark.test_fraction > 0.0 && c.benchmark.test_fraction < 1.0)) {
        throw ConfigError("benchmark.test_fraction must lie in (0, 1)");
    }

    const json& ds = merged["datasets"];
    if (!ds.is_array()) throw ConfigError("config key 'datasets' must be an array");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string p = "datasets[" + std::to_string(i) + "]";
        const json& e = ds[i];
        if (!e.is_object()) throw ConfigError(p + " must be an object");
        for (auto it = e.begin(); it != e.end(); ++it) {
            if (it.key() != "name" && it.key() != "path" && it.key() != "target") {
                throw ConfigError("unknown config key '" + p + "." + it.key() + "'");
            }
        }
        if (!e.contains("name") || !e.contains("path")) throw ConfigError(p + " needs 'name' and 'path'");
        DatasetEntry entry;
        entry.name = config_get<std::string>(e["name"], p + ".name");
        entry.path = config_get<std::string>(e["path"], p + ".path");
        if (e.contains("target")) entry.target = config_get<std::string>(e["target"], p + ".target");
        c.datasets.push_back(std::move(entry));
    }
    return c;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// Defaults, then each file in order, then overrides.
inline CliConfig resolve_config(const std::vector<std::string>& files, const std::vector<std::string>& overrides)
{
    json doc = to_json(CliConfig{});
    for (const auto& f : files) merge_strict(doc, read_json_file(f));
    for (const auto& o : overrides) apply_override(doc, o);
    return config_from_json(doc);
}

} // namespace suprb
