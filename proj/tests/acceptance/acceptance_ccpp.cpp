// Desk-scale check on the UCI Combined Cycle Power Plant data: 2 seeds x 4
// splits with default settings. The CSV path comes from the first argument or
// SUPRB_CCPP_CSV; without a readable file the check is skipped (exit 77).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "suprb/suprb.hpp"

using namespace suprb;

int main(int argc, char** argv)
{
    std::string path;
    if (argc > 1) {
        path = argv[1];
    } else if (const char* env = std::getenv("SUPRB_CCPP_CSV")) {
        path = env;
    }
    if (path.empty() || !std::filesystem::is_regular_file(path)) {
        std::printf("SKIP  [ 7] CCPP desk-scale check: no data file (set SUPRB_CCPP_CSV to a CSV with columns "
                    "AT,V,AP,RH,PE)\n");
        return 77;
    }

    const auto t0 = std::chrono::steady_clock::now();
    BenchmarkSettings settings;
    settings.n_seeds = 2;
    settings.n_splits = 4;
    BenchmarkReport report;
    try {
        report = run_benchmark({{"CCPP", [&] {
                                     std::ifstream in(path);
                                     const Table t = parse_table(in);
                                     const bool has_pe = std::find(t.header.begin(), t.header.end(), "PE") != t.header.end();
                                     return load_csv(path, has_pe ? "PE" : "", "CCPP");
                                 }}},
                               LearnerConfig{}, settings);
    } catch (const std::exception& e) {
        std::printf("FAIL  [ 7] CCPP desk-scale check: %s\n", e.what());
        return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& d = report.datasets.at(0);
    if (!d.ok || !d.complexity) {
        std::printf("FAIL  [ 7] CCPP desk-scale check: %s\n", d.error.c_str());
        return 1;
    }
    const bool pass = d.n_records == 8 && d.mse_sigma_mean <= 0.10 && d.complexity->mean <= 8.0 && secs <= 900.0;
    std::printf("%s  [ 7] CCPP desk-scale check         mean test MSE_sigma %.4f (need <= 0.10), mean complexity %.2f "
                "(need <= 8), min %zu, max %zu over %zu runs; %.1fs (limit 900s)\n",
                pass ? "PASS" : "FAIL", d.mse_sigma_mean, d.complexity->mean, d.complexity->min, d.complexity->max,
                d.n_records, secs);
    return pass ? 0 : 1;
}
