#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "data.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "learner.hpp"
#include "persistence.hpp"

// Command implementations behind the suprb executable. Each returns the
// process exit code and writes only to the streams it is given.
namespace suprb::cli {

enum ExitCode : int {
    kOk = 0,
    kDataError = 1,   // unreadable or malformed data/model files
    kConfigError = 2, // bad configuration or arguments
    kPartialFailure = 3,
};

enum class Format { text, machine };

struct FitOptions {
    std::string data_path;
    std::string target;
    std::vector<std::string> config_files;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::string model_out = "model.json";
    Format format = Format::text;
};

struct PredictOptions {
    std::string model_path;
    std::string data_path;
    std::string out_path; // empty: write to the output stream
};

struct InspectOptions {
    std::string model_path;
    std::optional<std::size_t> rule; // pool index; unset: every selected rule
    bool whole_pool = false;
    Format format = Format::text;
};

struct BenchmarkOptions {
    std::string registry_path;
    std::string out_dir = "benchmark_out";
    std::vector<std::string> config_files;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    Format format = Format::text;
};

struct GenerateOptions {
    std::size_t n = 1000;
    std::size_t segments = 3;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
    std::string out_path;
};

namespace detail {

inline std::string fmt(double v, int precision)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

inline std::string interval(double lo, double hi, int precision)
{
    return "[" + fmt(lo, precision) + ", " + fmt(hi, precision) + "]";
}

template <typename F>
int guarded(std::ostream& err, F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kConfigError;
    } catch (const SchemaError& e) {
        err << "model error: " << e.what() << '\n';
        return kDataError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
}

// Feature matrix for a trained model from a CSV: columns are picked by the
// model's feature names when all are present, otherwise the file must hold
// exactly d columns (features) or d + 1 (features plus the target).
inline Matrix select_features(const Table& t, const TrainedModel& model)
{
    const auto d = static_cast<std::size_t>(model.transform.dim());
    std::vector<std::size_t> cols;
    if (!model.feature_names.empty()) {
        for (const auto& name : model.feature_names) {
            const auto it = std::find(t.header.begin(), t.header.end(), name);
            if (it == t.header.end()) break;
            cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
        }
        if (cols.size() != d) cols.clear();
    }
    if (cols.empty()) {
        if (t.header.size() == d) {
            for (std::size_t c = 0; c < d; ++c) cols.push_back(c);
        } else if (t.header.size() == d + 1) {
            std::size_t target = d;
            if (!model.target_name.empty()) {
                const auto it = std::find(t.header.begin(), t.header.end(), model.target_name);
                if (it != t.header.end()) target = static_cast<std::size_t>(it - t.header.begin());
            }
            for (std::size_t c = 0; c <= d; ++c) {
                if (c != target) cols.push_back(c);
            }
        } else {
            throw DataError("data has " + std::to_string(t.header.size()) + " columns, model expects " +
                            std::to_string(d) + " features");
        }
    }
    Matrix X(t.values.rows(), static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c) X.col(static_cast<Eigen::Index>(c)) = t.values.col(static_cast<Eigen::Index>(cols[c]));
    return X;
}

inline json rule_json(const TrainedModel& m, std::size_t k)
{
    const Rule& r = m.pool.at(k);
    const auto& tf = m.transform;
    json features = json::array();
    for (Eigen::Index i = 0; i < r.bounds.dim(); ++i) {
        const std::string name = i < static_cast<Eigen::Index>(m.feature_names.size())
                                     ? m.feature_names[static_cast<std::size_t>(i)]
                                     : "x" + std::to_string(i);
        features.push_back({{"name", name},
                            {"original", {tf.unscale_feature(i, r.bounds.lower[i]), tf.unscale_feature(i, r.bounds.upper[i])}},
                            {"scaled", {r.bounds.lower[i], r.bounds.upper[i]}},
                            {"coefficient", r.coefficients[i]}});
    }
    return {{"index", k},
            {"selected", k < m.elitist.genome.size() && m.elitist.genome[k]},
            {"features", features},
            {"intercept_sigma", r.intercept},
            {"mse_sigma", r.in_sample_mse},
            {"mse_orig", r.in_sample_mse * tf.target_std * tf.target_std},
            {"experience", r.experience},
            {"volume", r.volume},
            {"fitness", r.fitness}};
}

inline void write_rule_text(std::ostream& out, const TrainedModel& m, std::size_t k)
{
    const Rule& r = m.pool.at(k);
    const auto& tf = m.transform;
    const bool selected = k < m.elitist.genome.size() && m.elitist.genome[k];
    out << "Rule " << k << (selected ? " (selected)" : "") << '\n';
    out << std::left << std::setw(28) << "input variable" << std::setw(30) << "original interval" << std::setw(20)
        << "feature interval" << std::right << std::setw(12) << "coefficient" << '\n';
    for (Eigen::Index i = 0; i < r.bounds.dim(); ++i) {
        const std::string name = i < static_cast<Eigen::Index>(m.feature_names.size())
                                     ? m.feature_names[static_cast<std::size_t>(i)]
                                     : "x" + std::to_string(i);
        out << std::left << std::setw(28) << name << std::setw(30)
            << interval(tf.unscale_feature(i, r.bounds.lower[i]), tf.unscale_feature(i, r.bounds.upper[i]), 2)
            << std::setw(20) << interval(r.bounds.lower[i], r.bounds.upper[i], 2) << std::right << std::setw(12)
            << fmt(r.coefficients[i], 4) << '\n';
    }
    out << "intercept_sigma = " << fmt(r.intercept, 4) << '\n';
    out << "In-sample MSE_orig " << fmt(r.in_sample_mse * tf.target_std * tf.target_std, 4) << "   In-sample MSE_sigma "
        << fmt(r.in_sample_mse, 4) << "   Experience " << r.experience << "\n\n";
}

inline json report_to_json(const BenchmarkReport& report, const LearnerConfig& learner)
{
    json datasets = json::array();
    for (const auto& d : report.datasets) {
        json s = {{"name", d.name}, {"status", d.ok ? "ok" : "failed"}, {"n_records", d.n_records}};
        if (!d.ok) s["error"] = d.error;
        if (d.n_records > 0) {
            s["mse_sigma_mean"] = d.mse_sigma_mean;
            s["mse_sigma_std"] = d.mse_sigma_std;
            s["mse_orig_mean"] = d.mse_orig_mean;
            s["baseline_mse_sigma_mean"] = d.baseline_mse_sigma_mean;
        }
        if (d.complexity) {
            s["complexity"] = {{"mean", d.complexity->mean}, {"std", d.complexity->std}, {"median", d.complexity->median},
                               {"min", d.complexity->min},   {"max", d.complexity->max}, {"degenerate", d.complexity->degenerate}};
        }
        if (d.baseline_test) {
            const auto& t = *d.baseline_test;
            s["paired_test"] = {{"test", "wilcoxon_signed_rank"}, {"against", t.against},
                                {"statistic", t.result.statistic}, {"p_value", t.result.p_value},
                                {"n", t.result.n}, {"exact", t.result.exact},
                                {"significant", t.significant}, {"better", t.better}};
        } else if (!d.test_note.empty()) {
            s["paired_test_note"] = d.test_note;
        }
        datasets.push_back(std::move(s));
    }
    json records = json::array();
    for (const auto& r : report.records) {
        records.push_back({{"dataset", r.dataset}, {"seed", r.seed}, {"split", r.split}, {"run_seed", r.run_seed},
                           {"mse_sigma", r.mse_sigma}, {"mse_orig", r.mse_orig}, {"target_std", r.target_std},
                           {"baseline_mse_sigma", r.baseline_mse_sigma}, {"complexity", r.complexity}});
    }
    // wall-clock times and job counts are left out so the document is reproducible
    return {{"format_version", 1},
            {"settings",
             {{"n_seeds", report.settings.n_seeds},
              {"n_splits", report.settings.n_splits},
              {"test_fraction", report.settings.test_fraction},
              {"seed", report.settings.seed}}},
            {"learner", to_json(learner)},
            {"datasets", datasets},
            {"records", records}};
}

inline void write_file(const std::filesystem::path& p, const std::string& content)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << content;
}

} // namespace detail

inline int cmd_fit(const FitOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        CliConfig cfg = resolve_config(opt.config_files, opt.overrides);
        if (opt.seed) cfg.learner.seed = *opt.seed;
        if (opt.jobs) cfg.learner.workers = *opt.jobs;
        const Dataset data = load_csv(opt.data_path, opt.target);
        const TrainedModel model = fit(data, cfg.learner);
        save_model(model, opt.model_out);
        if (opt.format == Format::machine) {
            out << json{{"model", opt.model_out},
                        {"fitness", model.elitist.fitness},
                        {"mse_sigma", model.elitist.in_sample_mse},
                        {"complexity", model.elitist.complexity},
                        {"pool_size", model.pool.size()}}
                       .dump()
                << '\n';
        } else {
            out << "trained on " << data.size() << " examples, " << data.dim() << " features\n"
                << "pool size            " << model.pool.size() << '\n'
                << "elitist fitness      " << detail::fmt(model.elitist.fitness, 6) << '\n'
                << "in-sample MSE_sigma  " << detail::fmt(model.elitist.in_sample_mse, 6) << '\n'
                << "complexity           " << model.elitist.complexity << '\n'
                << "model written to     " << opt.model_out << '\n';
        }
        return int{kOk};
    });
}

inline int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        const TrainedModel model = load_model(opt.model_path);
        std::ifstream in(opt.data_path);
        if (!in) throw DataError("cannot open data file '" + opt.data_path + "'");
        Table t;
        try {
            t = parse_table(in);
        } catch (const DataError& e) {
            throw DataError(opt.data_path + ": " + e.what());
        }
        const Vector pred = predict(model, detail::select_features(t, model));

        std::ostringstream buf;
        buf.precision(17);
        buf << (model.target_name.empty() ? "prediction" : model.target_name) << '\n';
        for (Eigen::Index i = 0; i < pred.size(); ++i) buf << pred[i] << '\n';
        if (opt.out_path.empty()) {
            out << buf.str();
        } else {
            detail::write_file(opt.out_path, buf.str());
        }
        return int{kOk};
    });
}

inline int cmd_inspect(const InspectOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        const TrainedModel model = load_model(opt.model_path);
        std::vector<std::size_t> which;
        if (opt.rule) {
            if (*opt.rule >= model.pool.size()) {
                throw InvalidArgument("rule index " + std::to_string(*opt.rule) + " out of range (pool has " +
                                      std::to_string(model.pool.size()) + " rules)");
            }
            which.push_back(*opt.rule);
        } else if (opt.whole_pool) {
            for (std::size_t k = 0; k < model.pool.size(); ++k) which.push_back(k);
        } else {
            which = model.selected();
        }

        if (opt.format == Format::machine) {
            json rules = json::array();
            for (auto k : which) rules.push_back(detail::rule_json(model, k));
            out << json{{"pool_size", model.pool.size()},
                        {"selected", model.selected()},
                        {"elitist_fitness", model.elitist.fitness},
                        {"elitist_mse_sigma", model.elitist.in_sample_mse},
                        {"rules", rules}}
                       .dump(1)
                << '\n';
            return int{kOk};
        }

        const std::size_t n_selected = model.elitist.complexity;
        out << "pool size " << model.pool.size() << ", " << n_selected << " selected rules, elitist fitness "
            << detail::fmt(model.elitist.fitness, 4) << ", in-sample MSE_sigma "
            << detail::fmt(model.elitist.in_sample_mse, 4) << "\n\n";
        if (n_selected == 0) {
            out << "warning: 0 selected rules, the model predicts the training mean everywhere\n";
        }
        for (auto k : which) detail::write_rule_text(out, model, k);
        return int{kOk};
    });
}

inline int cmd_benchmark(const BenchmarkOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        std::vector<std::string> files = opt.config_files;
        files.push_back(opt.registry_path);
        CliConfig cfg = resolve_config(files, opt.overrides);
        if (opt.seed) cfg.benchmark.seed = *opt.seed;
        if (opt.jobs) cfg.benchmark.jobs = *opt.jobs;
        if (cfg.datasets.empty()) throw ConfigError("registry '" + opt.registry_path + "' lists no datasets");

        const auto base = std::filesystem::path(opt.registry_path).parent_path();
        std::vector<DatasetSource> sources;
        for (const auto& d : cfg.datasets) {
            std::filesystem::path p(d.path);
            if (p.is_relative()) p = base / p;
            sources.push_back({d.name, [p, d] { return load_csv(p.string(), d.target, d.name); }});
        }
        const BenchmarkReport report = run_benchmark(sources, cfg.learner, cfg.benchmark);

        std::filesystem::create_directories(opt.out_dir);
        const auto dir = std::filesystem::path(opt.out_dir);
        const std::string machine = detail::report_to_json(report, cfg.learner).dump(1) + "\n";
        detail::write_file(dir / "report.json", machine);
        std::ostringstream csv, tables;
        write_records_csv(csv, report);
        write_tables(tables, report);
        detail::write_file(dir / "records.csv", csv.str());
        detail::write_file(dir / "tables.txt", tables.str());

        if (opt.format == Format::machine) {
            out << machine;
        } else {
            out << tables.str();
        }
        for (const auto& d : report.datasets) {
            err << (d.ok ? "ok      " : "FAILED  ") << d.name << " (" << d.n_records << " records)";
            if (!d.ok) err << ": " << d.error;
            err << '\n';
        }
        return report.all_ok() ? int{kOk} : int{kPartialFailure};
    });
}

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        const Dataset ds = gen_piecewise_linear(opt.n, opt.segments, opt.noise_std, opt.seed);
        std::ostringstream buf;
        write_csv(buf, ds);
        if (opt.out_path.empty()) {
            out << buf.str();
        } else {
            detail::write_file(opt.out_path, buf.str());
        }
        return int{kOk};
    });
}

} // namespace suprb::cli
