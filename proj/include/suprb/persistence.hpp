#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "error.hpp"
#include "learner.hpp"

namespace suprb {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline json vec_to_json(const Vector& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline const json& field(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object()) throw SchemaError(where + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError("missing field '" + where + "." + key + "'");
    return *it;
}

inline double number_field(const json& obj, const char* key, const std::string& where)
{
    const json& v = field(obj, key, where);
    if (!v.is_number()) throw SchemaError("field '" + where + "." + key + "' must be a number");
    return v.get<double>();
}

inline std::size_t count_field(const json& obj, const char* key, const std::string& where)
{
    const json& v = field(obj, key, where);
    if (!v.is_number_unsigned()) throw SchemaError("field '" + where + "." + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

inline Vector vec_field(const json& obj, const char* key, const std::string& where, Eigen::Index expected = -1)
{
    const json& v = field(obj, key, where);
    if (!v.is_array()) throw SchemaError("field '" + where + "." + key + "' must be an array");
    if (expected >= 0 && static_cast<Eigen::Index>(v.size()) != expected) {
        throw SchemaError("field '" + where + "." + key + "' must have " + std::to_string(expected) + " entries");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw SchemaError("field '" + where + "." + key + "' must contain numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

} // namespace detail

// Doubles are written in shortest round-trip form, so loading restores every
// value bit for bit.
inline json model_to_json(const TrainedModel& m)
{
    using detail::vec_to_json;
    json pool = json::array();
    for (const Rule& r : m.pool) {
        pool.push_back({{"lower", vec_to_json(r.bounds.lower)},
                        {"upper", vec_to_json(r.bounds.upper)},
                        {"coefficients", vec_to_json(r.coefficients)},
                        {"intercept", r.intercept},
                        {"mse", r.in_sample_mse},
                        {"experience", r.experience},
                        {"volume", r.volume},
                        {"fitness", r.fitness}});
    }
    std::string bits;
    for (bool b : m.elitist.genome) bits.push_back(b ? '1' : '0');
    return {
        {"format_version", kModelFormatVersion},
        {"feature_names", m.feature_names},
        {"target_name", m.target_name},
        {"transform",
         {{"feature_min", vec_to_json(m.transform.feature_min)},
          {"feature_max", vec_to_json(m.transform.feature_max)},
          {"target_mean", m.transform.target_mean},
          {"target_std", m.transform.target_std}}},
        {"pool", pool},
        {"elitist",
         {{"genome_bits", bits},
          {"fitness", m.elitist.fitness},
          {"complexity", m.elitist.complexity},
          {"mse", m.elitist.in_sample_mse}}},
        {"elitist_history", m.elitist_history},
        {"config", to_json(m.config)},
    };
}

inline TrainedModel model_from_json(const json& j)
{
    using namespace detail;
    if (!j.is_object()) throw SchemaError("model document must be a JSON object");
    const json& version = field(j, "format_version", "model");
    if (!version.is_number_integer()) throw SchemaError("field 'model.format_version' must be an integer");
    if (version.get<long long>() != kModelFormatVersion) {
        throw VersionMismatchError("unsupported model format_version " + version.dump() + " (this build reads " +
                                   std::to_string(kModelFormatVersion) + ")");
    }

    TrainedModel m;
    const json& t = field(j, "transform", "model");
    m.transform.feature_min = vec_field(t, "feature_min", "transform");
    const Eigen::Index d = m.transform.feature_min.size();
    if (d < 1) throw SchemaError("transform.feature_min must not be empty");
    m.transform.feature_max = vec_field(t, "feature_max", "transform", d);
    m.transform.target_mean = number_field(t, "target_mean", "transform");
    m.transform.target_std = number_field(t, "target_std", "transform");
    if (!(m.transform.target_std > 0.0)) throw SchemaError("transform.target_std must be > 0");
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(m.transform.feature_max[i] > m.transform.feature_min[i])) {
            throw SchemaError("transform.feature_max must exceed feature_min");
        }
    }

    if (j.contains("feature_names")) {
        const json& names = j["feature_names"];
        if (!names.is_array() || !(names.empty() || static_cast<Eigen::Index>(names.size()) == d)) {
            throw SchemaError("feature_names must list one name per feature");
        }
        for (const auto& n : names) {
            if (!n.is_string()) throw SchemaError("feature_names must be strings");
            m.feature_names.push_back(n.get<std::string>());
        }
    }
    if (j.contains("target_name")) {
        if (!j["target_name"].is_string()) throw SchemaError("target_name must be a string");
        m.target_name = j["target_name"].get<std::string>();
    }

    const json& pool = field(j, "pool", "model");
    if (!pool.is_array()) throw SchemaError("field 'model.pool' must be an array");
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const std::string where = "pool[" + std::to_string(k) + "]";
        const json& r = pool[k];
        Rule rule;
        rule.bounds.lower = vec_field(r, "lower", where, d);
        rule.bounds.upper = vec_field(r, "upper", where, d);
        rule.coefficients = vec_field(r, "coefficients", where, d);
        rule.intercept = number_field(r, "intercept", where);
        rule.in_sample_mse = number_field(r, "mse", where);
        rule.experience = count_field(r, "experience", where);
        rule.volume = number_field(r, "volume", where);
        rule.fitness = number_field(r, "fitness", where);
        for (Eigen::Index i = 0; i < d; ++i) {
            if (rule.bounds.lower[i] > rule.bounds.upper[i]) throw SchemaError(where + " has lower > upper");
        }
        if (rule.in_sample_mse < 0.0) throw SchemaError(where + ".mse must be >= 0");
        m.pool.append(std::move(rule));
    }

    const json& e = field(j, "elitist", "model");
    const json& bits = field(e, "genome_bits", "elitist");
    if (!bits.is_string()) throw SchemaError("field 'elitist.genome_bits' must be a string");
    const auto s = bits.get<std::string>();
    if (s.size() != m.pool.size()) throw SchemaError("elitist.genome_bits length does not match pool size");
    for (char c : s) {
        if (c != '0' && c != '1') throw SchemaError("elitist.genome_bits must contain only 0 and 1");
        m.elitist.genome.push_back(c == '1');
    }
    m.elitist.fitness = number_field(e, "fitness", "elitist");
    m.elitist.complexity = count_field(e, "complexity", "elitist");
    m.elitist.in_sample_mse = number_field(e, "mse", "elitist");
    if (m.elitist.complexity != popcount(m.elitist.genome)) {
        throw SchemaError("elitist.complexity does not match genome_bits");
    }

    if (j.contains("elitist_history")) {
        const Vector h = vec_field(j, "elitist_history", "model");
        m.elitist_history.assign(h.data(), h.data() + h.size());
    }
    try {
        m.config = learner_from_json(field(j, "config", "model"), "config");
    } catch (const ConfigError& err) {
        throw SchemaError(std::string("model config: ") + err.what());
    }
    return m;
}

inline void save_model(const TrainedModel& model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model file '" + path + "'");
    out << model_to_json(model).dump(1) << '\n';
    if (!out) throw IoError("failed writing model file '" + path + "'");
}

inline TrainedModel parse_model(std::istream& in)
{
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(j);
}

inline TrainedModel load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    return parse_model(in);
}

} // namespace suprb
