#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"

namespace suprb {

struct WilcoxonResult {
    double statistic = 0.0; // min(W+, W-)
    double p_value = 1.0;   // two-sided
    std::size_t n = 0;      // non-zero differences
    bool exact = false;
};

// Midranks (1-based) of |values|, ties averaged.
inline std::vector<double> average_ranks(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline constexpr std::size_t kWilcoxonExactLimit = 25;

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences are
// dropped and tied |differences| share their average rank. Up to 25 non-zero
// differences the null distribution of W+ is counted exactly over all 2^n sign
// patterns; beyond that a tie-corrected normal approximation with continuity
// correction is used.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw InvalidArgument("wilcoxon_signed_rank: samples differ in length");
    if (a.size() < 5) throw InvalidArgument("wilcoxon_signed_rank: at least 5 pairs required");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw DegenerateTestError("wilcoxon_signed_rank: all paired differences are zero");

    std::vector<double> mags(diffs.size());
    std::transform(diffs.begin(), diffs.end(), mags.begin(), [](double d) { return std::abs(d); });
    const auto ranks = average_ranks(mags);
    const std::size_t n = diffs.size();

    // doubled ranks are integers, which keeps the exact count free of rounding
    std::vector<std::int64_t> r2(n);
    std::int64_t w_plus2 = 0;
    std::int64_t total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r2[i] = std::llround(2.0 * ranks[i]);
        total2 += r2[i];
        if (diffs[i] > 0.0) w_plus2 += r2[i];
    }
    const std::int64_t t2 = std::min(w_plus2, total2 - w_plus2);

    WilcoxonResult res;
    res.n = n;
    res.statistic = 0.5 * static_cast<double>(t2);

    if (n <= kWilcoxonExactLimit) {
        // counts[s]: sign patterns whose doubled positive-rank sum equals s
        std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
        counts[0] = 1.0;
        std::int64_t reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::int64_t s = reach; s >= 0; --s) {
                counts[static_cast<std::size_t>(s + r2[i])] += counts[static_cast<std::size_t>(s)];
            }
            reach += r2[i];
        }
        double hits = 0.0;
        for (std::int64_t s = 0; s <= total2; ++s) {
            if (std::min(s, total2 - s) <= t2) hits += counts[static_cast<std::size_t>(s)];
        }
        res.p_value = hits / std::ldexp(1.0, static_cast<int>(n));
        res.exact = true;
        return res;
    }

    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted = ranks;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (res.statistic - mean + 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
    return res;
}

struct ComplexitySummary {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0; // sample standard deviation
    double median = 0.0;
    std::size_t min = 0;
    std::size_t max = 0;
    bool degenerate = false; // fewer than 2 values, std reported as 0
};

inline ComplexitySummary summarize_complexities(std::span<const std::size_t> values)
{
    if (values.empty()) throw InvalidArgument("summarize_complexities: no records");
    ComplexitySummary s;
    s.count = values.size();
    std::vector<std::size_t> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    const std::size_t n = sorted.size();
    s.median = n % 2 == 1 ? static_cast<double>(sorted[n / 2])
                          : 0.5 * static_cast<double>(sorted[n / 2 - 1] + sorted[n / 2]);
    double sum = 0.0;
    for (auto v : sorted) sum += static_cast<double>(v);
    s.mean = sum / static_cast<double>(n);
    if (n < 2) {
        s.degenerate = true;
        return s;
    }
    double ss = 0.0;
    for (auto v : sorted) ss += (static_cast<double>(v) - s.mean) * (static_cast<double>(v) - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
    return s;
}

inline double mean_of(std::span<const double> v)
{
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_std(std::span<const double> v)
{
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace suprb
