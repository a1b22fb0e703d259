#pragma once

// Benchmark harness: seeded random semiprimes per bit size, timed through
// the classical sieve.

#include "qsieve/classical.hpp"
#include "qsieve/support/semiprimes.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <vector>

namespace qsieve::cli {

struct BenchRow {
    unsigned bits = 0;
    std::size_t reps = 0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    std::size_t median_relations = 0;
    Natural median_smoothness_bound;
    Natural median_interval_half_width;
};

namespace detail {

template <class T>
T nearest_rank(std::vector<T> values, double quantile) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t rank = static_cast<std::size_t>(quantile * double(n) + 0.999999);
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return values[rank - 1];
}

}  // namespace detail

/// Times classical factorization of `reps` seeded semiprimes per bit size.
inline std::vector<BenchRow> run_bench(const std::vector<unsigned>& sizes, std::size_t reps,
                                       std::uint64_t seed) {
    if (reps == 0) throw std::invalid_argument("repetitions must be positive");
    std::vector<BenchRow> rows;
    for (const unsigned bits : sizes) {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * bits));
        std::vector<double> times;
        std::vector<std::size_t> relations;
        std::vector<Natural> bounds, widths;
        for (std::size_t r = 0; r < reps; ++r) {
            const support::Semiprime sp = support::random_semiprime_with_bits(rng, bits);
            classical::FactorRunStats stats;
            const auto t0 = std::chrono::steady_clock::now();
            const classical::FactorResult result =
                classical::factor(sp.n, std::nullopt, {}, &stats);
            const auto t1 = std::chrono::steady_clock::now();
            if (result.f1 * result.f2 != sp.n) {
                throw std::logic_error("benchmark factorization produced a wrong split");
            }
            times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            relations.push_back(stats.relations);
            bounds.push_back(stats.smoothness_bound);
            widths.push_back(stats.interval_half_width);
        }
        BenchRow row;
        row.bits = bits;
        row.reps = reps;
        row.median_ms = detail::nearest_rank(times, 0.5);
        row.p95_ms = detail::nearest_rank(times, 0.95);
        row.median_relations = detail::nearest_rank(relations, 0.5);
        row.median_smoothness_bound = detail::nearest_rank(bounds, 0.5);
        row.median_interval_half_width = detail::nearest_rank(widths, 0.5);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace qsieve::cli
