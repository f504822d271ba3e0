#include "mmfuse/composition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mmfuse/errors.hpp"

namespace mmfuse {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool single_output(const FusionLayer& fusion) {
    return std::visit(overloaded{
                          [](const CcaPlusRcca&) { return false; },
                          [](const auto& f) { return f.side != Side::both; },
                      },
                      fusion);
}

std::size_t fusion_dim(const FusionLayer& fusion) {
    return std::visit(overloaded{
                          [](const NoFusion&) -> std::size_t { return 0; },
                          [](const auto& f) -> std::size_t { return f.dim; },
                      },
                      fusion);
}

std::string num(std::size_t v) { return std::to_string(v); }

Matrix row_normalized(const Matrix& m) {
    Matrix out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm > 0) out.row(i) /= norm;
    }
    return out;
}

std::string layer_a_name(std::optional<std::size_t> pca_dim) {
    return pca_dim ? "/pca" + num(*pca_dim) : "";
}

}  // namespace

std::vector<std::string> validate_configuration(const Configuration& config, std::size_t dim_t,
                                                std::size_t dim_v) {
    std::vector<std::string> out;
    if (!std::isfinite(config.ridge) || config.ridge < 0) {
        out.emplace_back("ridge must be finite and non-negative");
    }

    std::size_t in_t = dim_t;
    std::size_t in_v = dim_v;
    if (config.pca_dim) {
        const std::size_t k = *config.pca_dim;
        if (k < 1) out.emplace_back("layer a: PCA dimension must be at least 1");
        if (k > dim_t) {
            out.emplace_back("layer a: PCA dimension " + num(k) + " exceeds textual dimension " +
                             num(dim_t));
        }
        if (k > dim_v) {
            out.emplace_back("layer a: PCA dimension " + num(k) + " exceeds visual dimension " +
                             num(dim_v));
        }
        in_t = in_v = k;
    }

    if (!std::holds_alternative<NoFusion>(config.fusion)) {
        const std::size_t k = fusion_dim(config.fusion);
        if (in_t != in_v) {
            out.emplace_back("layer b: CCA/R-CCA inputs must have the same dimensionality (textual " +
                             num(in_t) + ", visual " + num(in_v) + ")");
        }
        if (k < 1) out.emplace_back("layer b: fusion dimension must be at least 1");
        if (k > std::min(in_t, in_v)) {
            out.emplace_back("layer b: fusion dimension " + num(k) + " exceeds input dimension " +
                             num(std::min(in_t, in_v)));
        }
    }

    const bool combines = !std::holds_alternative<NoCombination>(config.combination);
    if (std::holds_alternative<CcaPlusRcca>(config.fusion)) {
        if (!combines) {
            out.emplace_back("layer c: CCA + R-CCA outputs must be consumed by concat or li");
        }
    } else if (single_output(config.fusion)) {
        if (combines) {
            out.emplace_back("layer c: concat/li needs two input tables but layer b outputs one side");
        }
    } else if (!combines) {
        out.emplace_back("layer c: both sides reach layer c but no combination motif is set");
    }

    if (const auto* li = std::get_if<Interpolate>(&config.combination)) {
        if (!(li->alpha >= 0.0 && li->alpha <= 1.0)) {
            out.emplace_back("layer c: LI weight must lie in [0, 1]");
        }
    }
    return out;
}

std::size_t output_dimension(const Configuration& config, std::size_t dim_t, std::size_t dim_v) {
    std::size_t t = config.pca_dim.value_or(dim_t);
    std::size_t v = config.pca_dim.value_or(dim_v);
    Side side = Side::both;
    std::visit(overloaded{
                   [&](const NoFusion& f) { side = f.side; },
                   [&](const CcaPlusRcca& f) { t = v = f.dim; },
                   [&](const auto& f) {
                       t = v = f.dim;
                       side = f.side;
                   },
               },
               config.fusion);
    if (side == Side::textual) return t;
    if (side == Side::visual) return v;
    if (std::holds_alternative<Concat>(config.combination)) return t + v;
    return std::max(t, v);
}

MotifSet motifs_of(const Configuration& config) {
    MotifSet s;
    if (config.pca_dim) s.insert(Motif::pca);
    std::visit(overloaded{
                   [](const NoFusion&) {},
                   [&](const CcaFusion&) { s.insert(Motif::cca); },
                   [&](const RccaFusion&) { s.insert(Motif::rcca); },
                   [&](const CcaPlusRcca&) {
                       s.insert(Motif::cca);
                       s.insert(Motif::rcca);
                   },
               },
               config.fusion);
    if (std::holds_alternative<Concat>(config.combination)) s.insert(Motif::concat);
    if (std::holds_alternative<Interpolate>(config.combination)) s.insert(Motif::li);
    return s;
}

std::vector<std::size_t> dimension_grid(const GridSpec& grid, std::size_t bound) {
    std::vector<std::size_t> dims;
    for (std::size_t d = grid.dim_min; d <= bound; d += grid.dim_step) dims.push_back(d);
    return dims;
}

std::vector<double> alpha_grid(const GridSpec& grid) {
    const auto steps = static_cast<std::size_t>(std::floor(1.0 / grid.alpha_step + 1e-9));
    std::vector<double> alphas;
    alphas.reserve(steps + 1);
    char buf[32];
    for (std::size_t i = 0; i <= steps; ++i) {
        // Snap i * step to 10 significant digits so 3 * 0.1 reads back as 0.3.
        std::snprintf(buf, sizeof buf, "%.10g", static_cast<double>(i) * grid.alpha_step);
        alphas.push_back(std::min(1.0, std::strtod(buf, nullptr)));
    }
    return alphas;
}

std::vector<Configuration> enumerate_configurations(std::size_t dim_t, std::size_t dim_v,
                                                    const GridSpec& grid) {
    if (grid.dim_step < 1 || grid.dim_min < 1) {
        throw GridError("dimension step and minimum must be at least 1");
    }
    if (!(grid.alpha_step > 0.0 && grid.alpha_step <= 1.0)) {
        throw GridError("alpha step must lie in (0, 1]");
    }
    if (!std::isfinite(grid.ridge) || grid.ridge < 0) {
        throw GridError("ridge must be finite and non-negative");
    }
    if (dim_t < 1 || dim_v < 1) throw GridError("input dimensions must be positive");

    const auto alphas = alpha_grid(grid);
    std::vector<CombinationLayer> pair_combos{Concat{}};
    for (double a : alphas) pair_combos.emplace_back(Interpolate{a});

    std::vector<std::optional<std::size_t>> layer_a{std::nullopt};
    for (auto d : dimension_grid(grid, std::min(dim_t, dim_v))) layer_a.emplace_back(d);

    std::vector<Configuration> out;
    auto emit = [&](std::optional<std::size_t> a, FusionLayer fusion, CombinationLayer combo) {
        Configuration c;
        c.pca_dim = a;
        c.fusion = fusion;
        c.combination = combo;
        c.ridge = grid.ridge;
        c.normalize_concat = grid.normalize_concat;
        if (grid.motif_filter) {
            const MotifSet m = motifs_of(c);
            if (m.empty() || !m.subset_of(*grid.motif_filter)) return;
        }
        out.push_back(std::move(c));
    };
    auto emit_sided = [&](std::optional<std::size_t> a, auto make) {
        for (Side side : {Side::textual, Side::visual, Side::both}) {
            if (side == Side::both) {
                for (const auto& combo : pair_combos) emit(a, make(side), combo);
            } else {
                emit(a, make(side), NoCombination{});
            }
        }
    };

    for (const auto& a : layer_a) {
        const std::size_t in_t = a.value_or(dim_t);
        const std::size_t in_v = a.value_or(dim_v);
        emit_sided(a, [](Side s) { return FusionLayer{NoFusion{s}}; });
        if (in_t != in_v) continue;

        const auto fusion_dims = dimension_grid(grid, in_t);
        for (auto k : fusion_dims) {
            emit_sided(a, [k](Side s) { return FusionLayer{CcaFusion{k, s}}; });
        }
        for (auto k : fusion_dims) {
            emit_sided(a, [k](Side s) { return FusionLayer{RccaFusion{k, s}}; });
        }
        for (auto k : fusion_dims) {
            for (Modality cs : {Modality::textual, Modality::visual}) {
                for (Modality rs : {Modality::textual, Modality::visual}) {
                    for (const auto& combo : pair_combos) emit(a, CcaPlusRcca{k, cs, rs}, combo);
                }
            }
        }
    }
    return out;
}

ScoringModel::ScoringModel(EmbeddingTable first, EmbeddingTable second, double alpha)
    : kind_(Pair{std::move(first), std::move(second), alpha}) {
    const auto& p = std::get<Pair>(kind_);
    if (p.first.shared_vocab() != p.second.shared_vocab() && !(p.first.vocab() == p.second.vocab())) {
        throw AlignmentError("paired tables must share one ordered vocabulary");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("LI weight must lie in [0, 1]");
}

const Vocabulary& ScoringModel::vocab() const {
    return is_pair() ? pair().first.vocab() : single().table.vocab();
}

std::size_t ScoringModel::output_dim() const {
    if (!is_pair()) return single().table.dim();
    return std::max(pair().first.dim(), pair().second.dim());
}

FitCache::FitCache(EmbeddingTable textual, EmbeddingTable visual)
    : textual_(std::move(textual)), visual_(std::move(visual)) {
    if (textual_.shared_vocab() != visual_.shared_vocab() && !(textual_.vocab() == visual_.vocab())) {
        throw AlignmentError("textual and visual tables are not vocabulary-aligned");
    }
}

template <class Fn>
std::shared_ptr<const FitCache::TablePair> FitCache::once(const Key& key, Fn&& compute) {
    std::unique_lock lock(mutex_);
    if (auto it = slots_.find(key); it != slots_.end()) {
        Slot slot = it->second;
        lock.unlock();
        return slot.get();
    }
    std::promise<std::shared_ptr<const TablePair>> promise;
    Slot slot = promise.get_future().share();
    slots_.emplace(key, slot);
    lock.unlock();
    try {
        promise.set_value(std::make_shared<const TablePair>(compute()));
    } catch (...) {
        promise.set_exception(std::current_exception());
    }
    return slot.get();
}

std::size_t FitCache::computed() const {
    std::lock_guard lock(mutex_);
    return slots_.size();
}

std::shared_ptr<const FitCache::TablePair> FitCache::data_layer(std::optional<std::size_t> pca_dim) {
    return once(Key{0, pca_dim.value_or(0), 0, 0.0}, [&]() -> TablePair {
        if (!pca_dim) return {textual_, visual_};
        const std::size_t k = *pca_dim;
        auto reduce = [k](const EmbeddingTable& t) {
            return t.derive(pca_transform(pca_fit(t.matrix(), k), t.matrix()),
                            t.name() + layer_a_name(k));
        };
        return {reduce(textual_), reduce(visual_)};
    });
}

std::shared_ptr<const FitCache::TablePair> FitCache::cca_layer(std::optional<std::size_t> pca_dim,
                                                               std::size_t dim, double ridge) {
    return once(Key{1, pca_dim.value_or(0), dim, ridge}, [&]() -> TablePair {
        auto in = data_layer(pca_dim);
        const auto& [t, v] = *in;
        const CcaModel model = cca_fit(t.matrix(), v.matrix(), dim, ridge);
        const std::string tag = "/cca" + num(dim);
        return {t.derive(cca_transform(model, t.matrix(), Modality::textual), t.name() + tag),
                v.derive(cca_transform(model, v.matrix(), Modality::visual), v.name() + tag)};
    });
}

std::shared_ptr<const FitCache::TablePair> FitCache::residual_layer(
    std::optional<std::size_t> pca_dim, std::size_t dim, double ridge) {
    return once(Key{2, pca_dim.value_or(0), dim, ridge}, [&]() -> TablePair {
        auto in = data_layer(pca_dim);
        auto projected = cca_layer(pca_dim, dim, ridge);
        const std::string tag = "/rcca" + num(dim);
        auto residual = [&](const EmbeddingTable& original, const EmbeddingTable& proj) {
            Matrix r;
            if (original.dim() == dim) {
                r = rcca_residual(original.matrix(), proj.matrix());
            } else {
                const PcaModel reduction = pca_fit(original.matrix(), dim);
                r = rcca_residual(original.matrix(), proj.matrix(), &reduction);
            }
            return original.derive(std::move(r), original.name() + tag);
        };
        return {residual(in->first, projected->first), residual(in->second, projected->second)};
    });
}

ScoringModel apply_configuration(const Configuration& config, const EmbeddingTable& textual,
                                 const EmbeddingTable& visual) {
    FitCache cache(textual, visual);
    return apply_configuration(config, cache);
}

ScoringModel apply_configuration(const Configuration& config, FitCache& cache) {
    const auto violations =
        validate_configuration(config, cache.textual().dim(), cache.visual().dim());
    if (!violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ValidationError(msg);
    }

    // Layer b output as (first, second); single-side outcomes use only one.
    std::shared_ptr<const FitCache::TablePair> tables;
    Side side = Side::both;
    std::optional<std::pair<EmbeddingTable, EmbeddingTable>> mixed;

    std::visit(overloaded{
                   [&](const NoFusion& f) {
                       tables = cache.data_layer(config.pca_dim);
                       side = f.side;
                   },
                   [&](const CcaFusion& f) {
                       tables = cache.cca_layer(config.pca_dim, f.dim, config.ridge);
                       side = f.side;
                   },
                   [&](const RccaFusion& f) {
                       tables = cache.residual_layer(config.pca_dim, f.dim, config.ridge);
                       side = f.side;
                   },
                   [&](const CcaPlusRcca& f) {
                       auto proj = cache.cca_layer(config.pca_dim, f.dim, config.ridge);
                       auto res = cache.residual_layer(config.pca_dim, f.dim, config.ridge);
                       const auto& c = f.cca_side == Modality::textual ? proj->first : proj->second;
                       const auto& r = f.rcca_side == Modality::textual ? res->first : res->second;
                       // Textual-derived input first; on equal modality the CCA output leads.
                       if (f.cca_side == f.rcca_side || f.cca_side == Modality::textual) {
                           mixed.emplace(c, r);
                       } else {
                           mixed.emplace(r, c);
                       }
                   },
               },
               config.fusion);

    if (!mixed) {
        if (side == Side::textual) return ScoringModel({tables->first});
        if (side == Side::visual) return ScoringModel({tables->second});
    }
    const EmbeddingTable& first = mixed ? mixed->first : tables->first;
    const EmbeddingTable& second = mixed ? mixed->second : tables->second;

    if (const auto* li = std::get_if<Interpolate>(&config.combination)) {
        return ScoringModel(first, second, li->alpha);
    }
    Matrix joined(first.matrix().rows(), first.matrix().cols() + second.matrix().cols());
    if (config.normalize_concat) {
        joined << row_normalized(first.matrix()), row_normalized(second.matrix());
    } else {
        joined << first.matrix(), second.matrix();
    }
    return ScoringModel({first.derive(std::move(joined), first.name() + "+" + second.name())});
}

}  // namespace mmfuse
