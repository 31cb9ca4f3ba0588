#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "data.hpp"
#include "learner.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace suprb {

struct BenchmarkSettings {
    std::size_t n_seeds = 8;
    std::size_t n_splits = 8;
    double test_fraction = 0.25;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

// One train/test run. Errors are measured on the held-out split.
struct RunRecord {
    std::string dataset;
    std::size_t seed = 0;
    std::size_t split = 0;
    std::uint64_t run_seed = 0;
    double mse_sigma = 0.0;
    double mse_orig = 0.0;
    double target_std = 1.0;         // training-split target std
    double baseline_mse_sigma = 0.0; // single global ridge model on the same split
    std::size_t complexity = 0;
    double elapsed = 0.0;            // seconds, wall clock
};

struct PairedTest {
    std::string against;
    WilcoxonResult result;
    bool significant = false; // at the 5% level
    bool better = false;      // lower mean test error than the comparison
};

struct DatasetSummary {
    std::string name;
    bool ok = true;
    std::string error;
    std::size_t n_records = 0;
    double mse_sigma_mean = 0.0;
    double mse_sigma_std = 0.0;
    double mse_orig_mean = 0.0;
    double baseline_mse_sigma_mean = 0.0;
    std::optional<ComplexitySummary> complexity;
    std::optional<PairedTest> baseline_test;
    std::string test_note;
};

struct BenchmarkReport {
    BenchmarkSettings settings;
    std::vector<RunRecord> records;
    std::vector<DatasetSummary> datasets;

    bool all_ok() const
    {
        return std::all_of(datasets.begin(), datasets.end(), [](const DatasetSummary& d) { return d.ok; });
    }
};

struct DatasetSource {
    std::string name;
    std::function<Dataset()> load;
};

inline std::uint64_t run_seed(std::uint64_t benchmark_seed, const std::string& dataset, std::size_t seed_index,
                              std::size_t split_index)
{
    return derive_seed({benchmark_seed, hash_name(dataset), seed_index, split_index});
}

// Splits are shared by all learner seeds of a dataset.
inline std::uint64_t split_seed(std::uint64_t benchmark_seed, const std::string& dataset, std::size_t split_index)
{
    return derive_seed({benchmark_seed, hash_name(dataset), 0x5370'6c69'74ULL, split_index});
}

// Trains on one split and scores on its held-out part.
inline RunRecord evaluate_run(const Dataset& data, const Split& split, const LearnerConfig& base, std::uint64_t seed)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset train = subset(data, split.train);
    const Dataset test = subset(data, split.test);

    LearnerConfig cfg = base;
    cfg.seed = seed;
    const TrainedModel model = fit(train, cfg);

    const Matrix Xs = model.transform.scale_features(test.X);
    const Vector ys = model.transform.standardize(test.y);
    const Vector pred_s = predict_scaled(model, Xs);
    const Vector pred = model.transform.unstandardize(pred_s);

    // global linear reference, the same submodel fitted on every training row
    const Matrix train_Xs = model.transform.scale_features(train.X);
    const Vector train_ys = model.transform.standardize(train.y);
    std::vector<std::size_t> all_rows(train.size());
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
    Vector w;
    double b = 0.0, train_mse = 0.0;
    fit_linear(train_Xs, train_ys, all_rows, cfg.ridge_coeff, w, b, train_mse);
    const Vector base_pred = (Xs * w).array() + b;

    RunRecord rec;
    rec.dataset = data.name;
    rec.run_seed = seed;
    rec.mse_sigma = (pred_s - ys).squaredNorm() / static_cast<double>(ys.size());
    rec.mse_orig = (pred - test.y).squaredNorm() / static_cast<double>(ys.size());
    rec.target_std = model.transform.target_std;
    rec.baseline_mse_sigma = (base_pred - ys).squaredNorm() / static_cast<double>(ys.size());
    rec.complexity = model.elitist.complexity;
    rec.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

namespace detail {

inline DatasetSummary summarize_dataset(const std::string& name, const std::vector<RunRecord>& recs)
{
    DatasetSummary s;
    s.name = name;
    s.n_records = recs.size();
    if (recs.empty()) return s;
    std::vector<double> mse, orig, base;
    std::vector<std::size_t> comp;
    for (const auto& r : recs) {
        mse.push_back(r.mse_sigma);
        orig.push_back(r.mse_orig);
        base.push_back(r.baseline_mse_sigma);
        comp.push_back(r.complexity);
    }
    s.mse_sigma_mean = mean_of(mse);
    s.mse_sigma_std = sample_std(mse);
    s.mse_orig_mean = mean_of(orig);
    s.baseline_mse_sigma_mean = mean_of(base);
    s.complexity = summarize_complexities(comp);
    try {
        PairedTest t;
        t.against = "global_ridge";
        t.result = wilcoxon_signed_rank(mse, base);
        t.significant = t.result.p_value < 0.05;
        t.better = s.mse_sigma_mean < s.baseline_mse_sigma_mean;
        s.baseline_test = t;
    } catch (const Error& e) {
        s.test_note = e.what();
    }
    return s;
}

} // namespace detail

// n_seeds x n_splits runs per dataset. Runs execute on up to settings.jobs
// threads; the report is assembled in (dataset, seed, split) order, so it does
// not depend on scheduling. A dataset that fails to load or train is flagged
// and the remaining datasets still run.
inline BenchmarkReport run_benchmark(const std::vector<DatasetSource>& sources, const LearnerConfig& config,
                                     const BenchmarkSettings& settings)
{
    config.validate();
    if (settings.n_seeds < 1 || settings.n_splits < 1) throw InvalidArgument("benchmark needs >= 1 seed and split");

    BenchmarkReport report;
    report.settings = settings;

    std::vector<std::optional<Dataset>> data(sources.size());
    std::vector<std::string> load_errors(sources.size());
    std::vector<std::vector<Split>> splits(sources.size());
    for (std::size_t d = 0; d < sources.size(); ++d) {
        try {
            Dataset ds = sources[d].load();
            ds.name = sources[d].name;
            validate_data(ds.X, ds.y);
            for (std::size_t p = 0; p < settings.n_splits; ++p) {
                splits[d].push_back(monte_carlo_split(ds.size(), settings.test_fraction, split_seed(settings.seed, ds.name, p)));
            }
            data[d] = std::move(ds);
        } catch (const std::exception& e) {
            load_errors[d] = e.what();
        }
    }

    struct Task {
        std::size_t dataset, seed, split;
    };
    std::vector<Task> tasks;
    for (std::size_t d = 0; d < sources.size(); ++d) {
        if (!data[d]) continue;
        for (std::size_t s = 0; s < settings.n_seeds; ++s) {
            for (std::size_t p = 0; p < settings.n_splits; ++p) tasks.push_back({d, s, p});
        }
    }

    std::vector<std::optional<RunRecord>> results(tasks.size());
    std::vector<std::string> run_errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            const Dataset& ds = *data[t.dataset];
            try {
                RunRecord r = evaluate_run(ds, splits[t.dataset][t.split], config,
                                           run_seed(settings.seed, ds.name, t.seed, t.split));
                r.seed = t.seed;
                r.split = t.split;
                results[i] = std::move(r);
            } catch (const std::exception& e) {
                run_errors[i] = e.what();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(settings.jobs, 1, std::max<std::size_t>(tasks.size(), 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::size_t ti = 0;
    for (std::size_t d = 0; d < sources.size(); ++d) {
        if (!data[d]) {
            DatasetSummary s;
            s.name = sources[d].name;
            s.ok = false;
            s.error = load_errors[d];
            report.datasets.push_back(std::move(s));
            continue;
        }
        std::vector<RunRecord> recs;
        std::string first_error;
        for (std::size_t k = 0; k < settings.n_seeds * settings.n_splits; ++k, ++ti) {
            if (results[ti]) {
                recs.push_back(*results[ti]);
            } else if (first_error.empty()) {
                const Task& t = tasks[ti];
                first_error = "seed " + std::to_string(t.seed) + " split " + std::to_string(t.split) + ": " + run_errors[ti];
            }
        }
        DatasetSummary s = detail::summarize_dataset(sources[d].name, recs);
        if (!first_error.empty()) {
            s.ok = false;
            s.error = first_error;
        }
        report.records.insert(report.records.end(), recs.begin(), recs.end());
        report.datasets.push_back(std::move(s));
    }
    return report;
}

// Raw per-run records, including wall-clock time.
inline void write_records_csv(std::ostream& out, const BenchmarkReport& report)
{
    std::ostringstream buf;
    buf.precision(17);
    buf << "dataset,seed,split,run_seed,mse_sigma,mse_orig,target_std,baseline_mse_sigma,complexity,elapsed\n";
    for (const auto& r : report.records) {
        buf << r.dataset << ',' << r.seed << ',' << r.split << ',' << r.run_seed << ',' << r.mse_sigma << ',' << r.mse_orig
            << ',' << r.target_std << ',' << r.baseline_mse_sigma << ',' << r.complexity << ',' << r.elapsed << '\n';
    }
    out << buf.str();
}

// Aligned error and complexity tables, one column per dataset.
inline void write_tables(std::ostream& out, const BenchmarkReport& report)
{
    std::vector<const DatasetSummary*> ok;
    for (const auto& d : report.datasets) {
        if (d.ok || d.n_records > 0) ok.push_back(&d);
    }
    constexpr int label_w = 22;
    constexpr int col_w = 14;
    auto header = [&](const char* title) {
        out << title << '\n' << std::left << std::setw(label_w) << "";
        for (auto* d : ok) out << std::right << std::setw(col_w) << d->name;
        out << '\n';
    };
    auto row = [&](const char* label, auto value, int precision) {
        out << std::left << std::setw(label_w) << label << std::right << std::fixed << std::setprecision(precision);
        for (auto* d : ok) out << std::setw(col_w) << value(*d);
        out << '\n';
    };

    header("Test errors (mean over runs)");
    row("MSE_orig", [](const DatasetSummary& d) { return d.mse_orig_mean; }, 4);
    row("MSE_sigma", [](const DatasetSummary& d) { return d.mse_sigma_mean; }, 4);
    row("STD_sigma", [](const DatasetSummary& d) { return d.mse_sigma_std; }, 4);
    row("baseline MSE_sigma", [](const DatasetSummary& d) { return d.baseline_mse_sigma_mean; }, 4);
    row("Wilcoxon p (vs base)",
        [](const DatasetSummary& d) {
            std::ostringstream p;
            if (d.baseline_test) {
                p << std::fixed << std::setprecision(4) << d.baseline_test->result.p_value;
            } else {
                p << "n/a";
            }
            return p.str();
        },
        4);
    out << '\n';

    header("Solution complexities");
    row("mean", [](const DatasetSummary& d) { return d.complexity ? d.complexity->mean : 0.0; }, 2);
    row("st. dev.", [](const DatasetSummary& d) { return d.complexity ? d.complexity->std : 0.0; }, 2);
    row("median", [](const DatasetSummary& d) { return d.complexity ? d.complexity->median : 0.0; }, 1);
    row("min", [](const DatasetSummary& d) { return d.complexity ? d.complexity->min : std::size_t{0}; }, 0);
    row("max", [](const DatasetSummary& d) { return d.complexity ? d.complexity->max : std::size_t{0}; }, 0);
    out.unsetf(std::ios::floatfield);

    for (const auto& d : report.datasets) {
        if (!d.ok) out << "\nFAILED " << d.name << ": " << d.error << '\n';
    }
}

} // namespace suprb
