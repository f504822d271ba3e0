#include "mmfuse/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "mmfuse/errors.hpp"

namespace mmfuse {

long long rho_rank_key(double rho) { return std::llround(rho * 1e12); }

bool entry_precedes(const SearchEntry& a, const SearchEntry& b) {
    if (a.ok() != b.ok()) return a.ok();
    if (a.ok()) {
        const auto ka = rho_rank_key(*a.result.rho);
        const auto kb = rho_rank_key(*b.result.rho);
        if (ka != kb) return ka > kb;
        if (a.output_dim != b.output_dim) return a.output_dim < b.output_dim;
    }
    return a.canonical_index < b.canonical_index;
}

void sort_entries(std::vector<SearchEntry>& entries) {
    std::sort(entries.begin(), entries.end(), entry_precedes);
}

std::size_t SearchReport::failed() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.ok(); }));
}

const SearchEntry& SearchReport::best() const {
    if (entries.empty() || !entries.front().ok()) {
        throw NoResultError("no successful configuration for " + benchmark_name);
    }
    return entries.front();
}

SearchReport grid_search(FitCache& cache, const Benchmark& bench, const GridSpec& grid,
                         const SearchOptions& options) {
    SearchReport report;
    report.benchmark_name = bench.name();
    report.grid = grid;
    report.dim_t = cache.textual().dim();
    report.dim_v = cache.visual().dim();

    const auto configs = enumerate_configurations(report.dim_t, report.dim_v, grid);
    if (configs.empty()) throw GridError("the grid contains no configuration");

    const std::size_t total = configs.size();
    report.entries.resize(total);
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            SearchEntry& entry = report.entries[i];
            entry.config = configs[i];
            entry.canonical_index = i;
            entry.output_dim = output_dimension(configs[i], report.dim_t, report.dim_v);
            entry.result.n_total = bench.size();
            try {
                entry.result = evaluate(apply_configuration(configs[i], cache), bench);
            } catch (const std::exception& e) {
                entry.result.rho.reset();
                entry.result.error = e.what();
            }
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                options.progress(++done, total);
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, total);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    sort_entries(report.entries);
    return report;
}

SearchReport grid_search(const EmbeddingTable& textual, const EmbeddingTable& visual,
                         const Benchmark& bench, const GridSpec& grid,
                         const SearchOptions& options) {
    FitCache cache(textual, visual);
    return grid_search(cache, bench, grid, options);
}

std::pair<Configuration, EvaluationResult> select_best(const SearchReport& report) {
    const auto& best = report.best();
    return {best.config, best.result};
}

std::vector<std::pair<std::string, EvaluationResult>> cross_evaluate(
    const Configuration& config, const EmbeddingTable& textual, const EmbeddingTable& visual,
    const std::vector<Benchmark>& benches) {
    const ScoringModel model = apply_configuration(config, textual, visual);
    std::vector<std::pair<std::string, EvaluationResult>> out;
    out.reserve(benches.size());
    for (const auto& b : benches) out.emplace_back(b.name(), evaluate(model, b));
    return out;
}

}  // namespace mmfuse
