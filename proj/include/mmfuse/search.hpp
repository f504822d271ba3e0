#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mmfuse/composition.hpp"
#include "mmfuse/evaluation.hpp"

namespace mmfuse {

struct SearchEntry {
    Configuration config;
    EvaluationResult result;
    std::size_t output_dim = 0;
    /// Position in enumerate_configurations order; the final tie-break.
    std::size_t canonical_index = 0;

    bool ok() const noexcept { return result.ok(); }
};

/// Ranking key for rho. Quantized to 1e-12 so values that are equal up to
/// floating-point summation noise tie and fall through to the dimension rule.
long long rho_rank_key(double rho);

/// Total order of a report: successful entries by rho descending, then output
/// dimension ascending, then canonical index; failed entries last by canonical index.
bool entry_precedes(const SearchEntry& a, const SearchEntry& b);
void sort_entries(std::vector<SearchEntry>& entries);

struct SearchReport {
    std::string benchmark_name;
    GridSpec grid;
    std::size_t dim_t = 0;
    std::size_t dim_v = 0;
    std::vector<SearchEntry> entries;

    std::size_t failed() const;
    /// entries[0]; throws NoResultError when no configuration succeeded.
    const SearchEntry& best() const;
};

struct SearchOptions {
    std::size_t workers = 1;
    /// Called with (completed, total) after each configuration; serialized.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Evaluates every configuration of the grid. Per-configuration failures are
/// kept as failed entries. The report does not depend on `options.workers`.
SearchReport grid_search(FitCache& cache, const Benchmark& bench, const GridSpec& grid,
                         const SearchOptions& options = {});
SearchReport grid_search(const EmbeddingTable& textual, const EmbeddingTable& visual,
                         const Benchmark& bench, const GridSpec& grid,
                         const SearchOptions& options = {});

/// The best configuration: highest rho, lowest output dimension among ties.
std::pair<Configuration, EvaluationResult> select_best(const SearchReport& report);

/// Applies `config` once and evaluates it on each benchmark.
std::vector<std::pair<std::string, EvaluationResult>> cross_evaluate(
    const Configuration& config, const EmbeddingTable& textual, const EmbeddingTable& visual,
    const std::vector<Benchmark>& benches);

}  // namespace mmfuse
