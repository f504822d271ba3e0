#pragma once

#include <cstddef>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "mmfuse/embeddings.hpp"
#include "mmfuse/numerics.hpp"

namespace mmfuse {

/// Which layer-b output(s) flow on: one modality, or both into layer c.
enum class Side { textual, visual, both };

// Layer b (fusion). Dimensions are the CCA target dimension.
struct NoFusion {
    Side side = Side::textual;
    bool operator==(const NoFusion&) const = default;
};
struct CcaFusion {
    std::size_t dim = 0;
    Side side = Side::both;
    bool operator==(const CcaFusion&) const = default;
};
struct RccaFusion {
    std::size_t dim = 0;
    Side side = Side::both;
    bool operator==(const RccaFusion&) const = default;
};
/// One CCA projection plus one R-CCA residual; always consumed by layer c.
struct CcaPlusRcca {
    std::size_t dim = 0;
    Modality cca_side = Modality::visual;
    Modality rcca_side = Modality::textual;
    bool operator==(const CcaPlusRcca&) const = default;
};
using FusionLayer = std::variant<NoFusion, CcaFusion, RccaFusion, CcaPlusRcca>;

// Layer c (combination).
struct NoCombination {
    bool operator==(const NoCombination&) const = default;
};
struct Concat {
    bool operator==(const Concat&) const = default;
};
/// Score-level linear interpolation; `alpha` weights the textual-derived input
/// (the CCA-derived one when both inputs come from the same modality).
struct Interpolate {
    double alpha = 0.5;
    bool operator==(const Interpolate&) const = default;
};
using CombinationLayer = std::variant<NoCombination, Concat, Interpolate>;

/// At most one motif per layer: data (optional shared PCA), fusion, combination.
struct Configuration {
    std::optional<std::size_t> pca_dim;
    FusionLayer fusion = NoFusion{};
    CombinationLayer combination = NoCombination{};
    double ridge = kDefaultRidge;
    /// L2-normalize each block's rows before concatenation.
    bool normalize_concat = false;

    bool operator==(const Configuration&) const = default;
};

/// Constraint violations for tables of the given widths; empty means valid.
std::vector<std::string> validate_configuration(const Configuration& config, std::size_t dim_t,
                                                std::size_t dim_v);

/// Width of the vectors a configuration scores with: the single table's dim,
/// the sum for concatenation, the larger of the two for LI.
std::size_t output_dimension(const Configuration& config, std::size_t dim_t, std::size_t dim_v);

// Flat key=value text form, e.g.
//   layer_a=pca:200
//   layer_b=cca_plus_rcca:200:cca=V:rcca=T
//   layer_c=li:0.4
//   ridge=0.001
// `parse_configuration` accepts entries separated by any whitespace and
// ignores '#' comments, so it reads both the file and the inline form.
std::string format_configuration(const Configuration& config);
std::string format_configuration_inline(const Configuration& config);
Configuration parse_configuration(std::string_view text);

/// Table-style label, e.g. "PCA (200) / CCA (V,200) + R-CCA (T,200) / LI (0.4)".
std::string describe_configuration(const Configuration& config);

enum class Motif : std::uint8_t { pca = 1, cca = 2, rcca = 4, concat = 8, li = 16 };

/// Small bit set of motifs.
class MotifSet {
public:
    MotifSet() = default;
    MotifSet(std::initializer_list<Motif> motifs) {
        for (auto m : motifs) insert(m);
    }
    void insert(Motif m) { bits_ |= static_cast<std::uint8_t>(m); }
    bool contains(Motif m) const { return (bits_ & static_cast<std::uint8_t>(m)) != 0; }
    bool empty() const { return bits_ == 0; }
    bool subset_of(const MotifSet& other) const { return (bits_ & ~other.bits_) == 0; }
    bool operator==(const MotifSet&) const = default;

private:
    std::uint8_t bits_ = 0;
};

MotifSet motifs_of(const Configuration& config);
/// Comma-separated names: pca, cca, rcca, concat, li.
MotifSet parse_motifs(std::string_view text);
std::string format_motifs(const MotifSet& motifs);

/// Search grid. Dimensions run dim_min, dim_min + dim_step, ... up to the
/// relevant input width; alphas run 0, alpha_step, ... up to 1.
struct GridSpec {
    std::size_t dim_step = 50;
    std::size_t dim_min = 50;
    double alpha_step = 0.1;
    double ridge = kDefaultRidge;
    /// When set, only configurations whose (non-empty) motif set is a subset.
    std::optional<MotifSet> motif_filter;
    bool normalize_concat = false;
};

std::vector<std::size_t> dimension_grid(const GridSpec& grid, std::size_t bound);
std::vector<double> alpha_grid(const GridSpec& grid);

/// Every valid configuration in canonical order: layer-a dim (none first),
/// fusion variant (none, CCA, R-CCA, CCA+R-CCA), fusion dim, sides,
/// combination (none, concat, LI), alpha. Throws GridError on a degenerate grid.
std::vector<Configuration> enumerate_configurations(std::size_t dim_t, std::size_t dim_v,
                                                    const GridSpec& grid);

/// Executable result of a configuration.
class ScoringModel {
public:
    struct Single {
        EmbeddingTable table;
    };
    struct Pair {
        EmbeddingTable first;
        EmbeddingTable second;
        double alpha;  // weight of `first`
    };

    explicit ScoringModel(Single s) : kind_(std::move(s)) {}
    ScoringModel(EmbeddingTable first, EmbeddingTable second, double alpha);

    bool is_pair() const noexcept { return std::holds_alternative<Pair>(kind_); }
    const Single& single() const { return std::get<Single>(kind_); }
    const Pair& pair() const { return std::get<Pair>(kind_); }
    const Vocabulary& vocab() const;
    std::size_t output_dim() const;

private:
    std::variant<Single, Pair> kind_;
};

/// Memoized intermediate tables for one aligned (textual, visual) input.
///
/// Each layer output is computed exactly once per key, also when many
/// threads ask concurrently; failures are cached and rethrown.
class FitCache {
public:
    using TablePair = std::pair<EmbeddingTable, EmbeddingTable>;

    FitCache(EmbeddingTable textual, EmbeddingTable visual);

    const EmbeddingTable& textual() const noexcept { return textual_; }
    const EmbeddingTable& visual() const noexcept { return visual_; }

    /// Layer a: raw tables, or both PCA-reduced to `pca_dim`.
    std::shared_ptr<const TablePair> data_layer(std::optional<std::size_t> pca_dim);
    /// CCA projections of the layer-a output.
    std::shared_ptr<const TablePair> cca_layer(std::optional<std::size_t> pca_dim, std::size_t dim,
                                               double ridge);
    /// R-CCA residuals of the layer-a output.
    std::shared_ptr<const TablePair> residual_layer(std::optional<std::size_t> pca_dim,
                                                    std::size_t dim, double ridge);

    /// Number of distinct layer outputs computed so far.
    std::size_t computed() const;

private:
    using Key = std::tuple<int, std::size_t, std::size_t, double>;
    using Slot = std::shared_future<std::shared_ptr<const TablePair>>;

    template <class Fn>
    std::shared_ptr<const TablePair> once(const Key& key, Fn&& compute);

    EmbeddingTable textual_;
    EmbeddingTable visual_;
    mutable std::mutex mutex_;
    std::map<Key, Slot> slots_;
};

/// Runs layers a, b, c. The tables must be vocabulary-aligned. Throws
/// ValidationError listing every violated constraint.
ScoringModel apply_configuration(const Configuration& config, const EmbeddingTable& textual,
                                 const EmbeddingTable& visual);
/// Same, reusing (and filling) `cache`.
ScoringModel apply_configuration(const Configuration& config, FitCache& cache);

}  // namespace mmfuse
