#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmfuse/composition.hpp"
#include "mmfuse/embeddings.hpp"

namespace mmfuse {

struct WordPair {
    std::string first;
    std::string second;
    double gold = 0.0;

    bool operator==(const WordPair&) const = default;
};

/// Human similarity judgments. Pairs are unordered for duplicate detection:
/// (a, b) and (b, a) may not both appear.
class Benchmark {
public:
    Benchmark(std::string name, std::vector<WordPair> pairs);

    const std::string& name() const noexcept { return name_; }
    const std::vector<WordPair>& pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }

private:
    std::string name_;
    std::vector<WordPair> pairs_;
};

/// "word1 <sep> word2 <sep> score" per line, <sep> a tab or a comma (taken
/// from the first data line, then required throughout). A first line whose
/// score field is not numeric is treated as a column header and skipped.
Benchmark load_benchmark(const std::filesystem::path& path, std::string name = {});
/// Tab-separated, scores in shortest round-trip form.
void save_benchmark(const Benchmark& bench, const std::filesystem::path& path);

/// Pairs whose two words are both in `vocab`, in original order.
Benchmark filter_coverage(const Benchmark& bench, const Vocabulary& vocab);

/// Norms below this make a vector degenerate for cosine scoring.
inline constexpr double kDegenerateNorm = 1e-12;

/// u.v / (|u||v|); 0 with `*degenerate = true` when a norm is below
/// kDegenerateNorm. Throws DimensionError on a length mismatch.
double cosine(std::span<const double> u, std::span<const double> v, bool* degenerate = nullptr);

/// Cosine on a single table; alpha * cos_first + (1 - alpha) * cos_second on a pair.
/// Throws LookupError for a word outside the model vocabulary.
double pair_score(const ScoringModel& model, std::string_view w1, std::string_view w2,
                  bool* degenerate = nullptr);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws UndefinedCorrelation for
/// fewer than two values or a constant side, DimensionError on unequal lengths.
double spearman(std::span<const double> a, std::span<const double> b);

struct EvaluationResult {
    /// Empty when the correlation is undefined (see `error`).
    std::optional<double> rho;
    std::size_t n_evaluated = 0;
    std::size_t n_total = 0;
    /// Scored pairs that touched a near-zero vector.
    std::size_t n_degenerate = 0;
    std::string error;

    bool ok() const noexcept { return rho.has_value(); }
    double coverage() const noexcept {
        return n_total ? static_cast<double>(n_evaluated) / static_cast<double>(n_total) : 0.0;
    }
};

/// Coverage-filters the benchmark against the model vocabulary and correlates
/// model scores with gold scores.
EvaluationResult evaluate(const ScoringModel& model, const Benchmark& bench);

}  // namespace mmfuse
