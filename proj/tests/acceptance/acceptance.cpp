// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "suprb/cli.hpp"
#include "suprb/suprb.hpp"

using namespace suprb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit; // seconds, <= 0 when unconstrained
    std::function<Outcome()> check;
};

std::string num(double v, int precision = 3)
{
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

Matrix uniform_matrix(Rng& rng, Eigen::Index n, Eigen::Index d, double lo = -1.0, double hi = 1.0)
{
    Matrix X(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) X(r, c) = lo + (hi - lo) * rng.uniform();
    }
    return X;
}

// 1. combine(x, x, a) = x and monotonicity on a grid
Outcome fitness_identity()
{
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform();
        const double alpha = 0.01 + 10.0 * rng.uniform();
        worst = std::max(worst, std::abs(combine(x, x, alpha) - x));
    }
    std::size_t violations = 0;
    for (double alpha : {0.05, 1.0, 5.0}) {
        for (int i = 0; i < 100; ++i) {
            for (int j = 1; j < 100; ++j) {
                const double a = i / 99.0, b0 = (j - 1) / 99.0, b1 = j / 99.0;
                if (combine(b1, a, alpha) < combine(b0, a, alpha)) ++violations;
                if (combine(a, b1, alpha) < combine(a, b0, alpha)) ++violations;
            }
        }
    }
    return {worst <= 1e-12 && violations == 0,
            "max |combine(x,x,a)-x| = " + num(worst) + " (tol 1e-12), monotonicity violations " +
                std::to_string(violations) + " on 100x100 grid"};
}

// 2. ridge 0 equals the augmented normal equations
Outcome ridge_oracle()
{
    Rng rng(202);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(8));
        const auto n = static_cast<Eigen::Index>(2 * d + 20 + rng.below(static_cast<std::uint64_t>(200 - 2 * d - 20 + 1)));
        const Matrix X = uniform_matrix(rng, n, d);
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = X.row(i).sum() * 0.7 - 0.3 + rng.normal();
        const Rule r = fit_submodel(Bounds{Vector::Constant(d, -1.0), Vector::Constant(d, 1.0)}, X, y, 0.0);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
        std::vector<double> ys(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < d; ++c) rows[static_cast<std::size_t>(i)].push_back(X(i, c));
            ys[static_cast<std::size_t>(i)] = y[i];
        }
        const auto beta = oracle::normal_equations(rows, ys);
        for (Eigen::Index c = 0; c <= d; ++c) {
            const double got = c < d ? r.coefficients[c] : r.intercept;
            const double want = beta[static_cast<std::size_t>(c)];
            worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-12));
        }
    }
    return {worst <= 1e-8, "max relative deviation " + num(worst) + " over 100 problems (tol 1e-8)"};
}

// 3. match_set equals a per-row loop
Outcome matching_oracle()
{
    Rng rng(303);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(6));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(100));
        Matrix X = uniform_matrix(rng, n, d, -1.2, 1.2);
        Bounds b{Vector(d), Vector(d)};
        for (Eigen::Index c = 0; c < d; ++c) {
            const double u = -1.0 + 2.0 * rng.uniform(), v = -1.0 + 2.0 * rng.uniform();
            b.lower[c] = std::min(u, v);
            b.upper[c] = std::max(u, v);
        }
        // put some rows exactly on the bounds
        if (n > 1) {
            X.row(0) = b.lower.transpose();
            X.row(n - 1) = b.upper.transpose();
        }
        std::vector<std::size_t> expected;
        for (Eigen::Index i = 0; i < n; ++i) {
            bool in = true;
            for (Eigen::Index c = 0; c < d; ++c) in = in && X(i, c) >= b.lower[c] && X(i, c) <= b.upper[c];
            if (in) expected.push_back(static_cast<std::size_t>(i));
        }
        if (match_set(b, X) != expected) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1000 random (rule, dataset) pairs"};
}

// 4. elitist fitness never decreases across cycles
Outcome monotone_elitist()
{
    std::size_t cycles = 0, decreases = 0;
    const std::vector<Dataset> sets = {gen_piecewise_linear(800, 4, 0.1, 1), gen_piecewise_linear(500, 2, 0.0, 2)};
    for (const auto& ds : sets) {
        LearnerConfig cfg;
        cfg.seed = 17;
        const TrainedModel m = fit(ds, cfg);
        for (std::size_t t = 1; t < m.elitist_history.size(); ++t) {
            if (m.elitist_history[t] < m.elitist_history[t - 1]) ++decreases;
        }
        cycles += m.elitist_history.size();
    }
    Rng rng(4);
    Dataset wave;
    wave.X = uniform_matrix(rng, 600, 3, 0.0, 5.0);
    wave.y.resize(600);
    for (Eigen::Index i = 0; i < 600; ++i) wave.y[i] = std::sin(wave.X(i, 0)) * wave.X(i, 1) + 0.1 * rng.normal();
    const TrainedModel m = fit(wave, LearnerConfig{});
    for (std::size_t t = 1; t < m.elitist_history.size(); ++t) {
        if (m.elitist_history[t] < m.elitist_history[t - 1]) ++decreases;
    }
    cycles += m.elitist_history.size();
    return {decreases == 0 && cycles == 96,
            std::to_string(decreases) + " decreases over " + std::to_string(cycles) + " cycles of 3 full fits"};
}

// 5. three-segment recovery over 8 seeds
Outcome synthetic_recovery()
{
    const Dataset ds = gen_piecewise_linear(1000, 3, 0.0, 5);

    // oracle: per-segment least squares on the standardized data
    const Transformed t = fit_transform(ds);
    double se = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> xs, ys;
        for (Eigen::Index i = 0; i < t.X.rows(); ++i) {
            if (ds.X(i, 0) >= ds.piecewise->breakpoints[k] && ds.X(i, 0) < ds.piecewise->breakpoints[k + 1]) {
                xs.push_back(t.X(i, 0));
                ys.push_back(t.y[i]);
            }
        }
        const auto [a, b] = oracle::simple_regression(xs, ys);
        for (std::size_t i = 0; i < xs.size(); ++i) se += (a + b * xs[i] - ys[i]) * (a + b * xs[i] - ys[i]);
    }
    const double oracle_mse = se / static_cast<double>(ds.size());

    BenchmarkSettings settings;
    settings.n_seeds = 8;
    settings.n_splits = 1;
    settings.seed = 55;
    const auto report = run_benchmark({{"pwl3", [&] { return ds; }}}, LearnerConfig{}, settings);
    std::size_t good = 0;
    double worst_mse = 0.0;
    std::size_t worst_c = 0;
    for (const auto& r : report.records) {
        if (r.mse_sigma < 0.05 && r.complexity <= 8) ++good;
        worst_mse = std::max(worst_mse, r.mse_sigma);
        worst_c = std::max(worst_c, r.complexity);
    }
    return {oracle_mse < 1e-10 && report.records.size() == 8 && good >= 7,
            std::to_string(good) + "/8 runs with test MSE_sigma < 0.05 and complexity <= 8 (need 7); worst MSE_sigma " +
                num(worst_mse) + ", max complexity " + std::to_string(worst_c) + "; oracle 3-rule MSE_sigma " +
                num(oracle_mse) + " (need < 1e-10)"};
}

// 6. 128 pool rules and 64 benchmark records with defaults
Outcome pool_size_contract()
{
    const Dataset ds = gen_piecewise_linear(400, 3, 0.05, 6);
    const TrainedModel m = fit(ds, LearnerConfig{});
    const auto report = run_benchmark({{"pwl3", [&] { return ds; }}}, LearnerConfig{}, BenchmarkSettings{});
    return {m.pool.size() == 128 && report.records.size() == 64 && report.datasets[0].n_records == 64,
            "pool size " + std::to_string(m.pool.size()) + " (need 128), benchmark records " +
                std::to_string(report.records.size()) + " (need 64)"};
}

// 8. Wilcoxon exact path against 2^n enumeration
Outcome wilcoxon_oracle()
{
    Rng rng(808);
    double worst = 0.0;
    std::size_t stat_mismatch = 0, cases = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(rng.below(8));
        std::vector<double> a(n), b(n);
        const bool coarse = trial % 4 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = coarse ? static_cast<double>(rng.below(4)) : rng.normal();
            b[i] = coarse ? static_cast<double>(rng.below(4)) : rng.normal();
        }
        if (a == b) a[0] += 1.0;
        const auto [t, p] = oracle::wilcoxon_enumerate(a, b);
        const auto r = wilcoxon_signed_rank(a, b);
        worst = std::max(worst, std::abs(r.p_value - p));
        if (r.statistic != t) ++stat_mismatch;
        ++cases;
    }
    return {worst <= 1e-10 && stat_mismatch == 0,
            "max |p - p_enum| = " + num(worst) + " (tol 1e-10), statistic mismatches " + std::to_string(stat_mismatch) +
                " over " + std::to_string(cases) + " samples with n <= 12"};
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 9. byte-identical benchmark reports
Outcome determinism()
{
    const fs::path dir = fs::temp_directory_path() / ("suprb_acceptance_" + std::to_string(getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "a.csv");
        write_csv(out, gen_piecewise_linear(300, 3, 0.05, 9));
        std::ofstream out2(dir / "b.csv");
        write_csv(out2, gen_piecewise_linear(250, 2, 0.1, 10));
    }
    {
        std::ofstream reg(dir / "registry.json");
        reg << R"({"datasets": [{"name": "a", "path": "a.csv", "target": "y"}, {"name": "b", "path": "b.csv", "target": ""}],
                   "learner": {"n_iter": 8}})";
    }
    auto run = [&](std::size_t jobs, const std::string& out) {
        cli::BenchmarkOptions o;
        o.registry_path = (dir / "registry.json").string();
        o.out_dir = (dir / out).string();
        o.seed = 2024;
        o.jobs = jobs;
        std::ostringstream sink, err;
        return cli::cmd_benchmark(o, sink, err);
    };
    const int c1 = run(1, "r1");
    const int c2 = run(1, "r2");
    const int c4 = run(4, "r4");
    const std::string r1 = read_file(dir / "r1/report.json");
    const std::string r2 = read_file(dir / "r2/report.json");
    const std::string r4 = read_file(dir / "r4/report.json");
    fs::remove_all(dir);
    const bool ok = c1 == 0 && c2 == 0 && c4 == 0 && !r1.empty() && r1 == r2 && r1 == r4;
    return {ok, "exit codes " + std::to_string(c1) + "/" + std::to_string(c2) + "/" + std::to_string(c4) +
                    ", report.json " + std::to_string(r1.size()) + " bytes; rerun identical: " + (r1 == r2 ? "yes" : "no") +
                    ", --jobs 1 vs 4 identical: " + (r1 == r4 ? "yes" : "no")};
}

// 10. save -> load keeps predictions bit-exact
Outcome persistence()
{
    Rng rng(10);
    Dataset ds;
    ds.feature_names = {"p", "q", "r"};
    ds.target_name = "z";
    ds.X = uniform_matrix(rng, 400, 3, -50.0, 80.0);
    ds.y.resize(400);
    for (Eigen::Index i = 0; i < 400; ++i) ds.y[i] = 1e3 + std::tanh(ds.X(i, 0) / 30.0) * ds.X(i, 1) - 0.2 * ds.X(i, 2);
    const TrainedModel m = fit(ds, LearnerConfig{});
    const fs::path p = fs::temp_directory_path() / ("suprb_acceptance_model_" + std::to_string(getpid()) + ".json");
    save_model(m, p.string());
    const TrainedModel back = load_model(p.string());
    fs::remove(p);
    const Matrix Xq = uniform_matrix(rng, 100, 3, -60.0, 90.0);
    const Vector a = predict(m, Xq);
    const Vector b = predict(back, Xq);
    std::size_t differ = 0;
    for (Eigen::Index i = 0; i < 100; ++i) {
        if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) ++differ;
    }
    return {differ == 0, std::to_string(differ) + " of 100 predictions differ bitwise after save/load"};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "fitness identity and monotonicity", 1.0, fitness_identity},
        {2, "ridge oracle", 5.0, ridge_oracle},
        {3, "matching oracle", 5.0, matching_oracle},
        {4, "monotone elitist", 0.0, monotone_elitist},
        {5, "synthetic recovery", 120.0, synthetic_recovery},
        {6, "pool-size contract", 0.0, pool_size_contract},
        {8, "Wilcoxon oracle", 10.0, wilcoxon_oracle},
        {9, "benchmark determinism", 0.0, determinism},
        {10, "persistence round-trip", 0.0, persistence},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.time_limit <= 0.0 || secs <= c.time_limit;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s  [%2d] %-36s %s; %.2fs%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.time_limit > 0.0 ? (" (limit " + num(c.time_limit) + "s)").c_str() : "");
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
