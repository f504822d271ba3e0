#include <doctest.h>

#include <algorithm>
#include <set>
#include <thread>

#include "fixtures.hpp"
#include "mmfuse/composition.hpp"
#include "mmfuse/errors.hpp"
#include "oracle_values.hpp"

using namespace mmfuse;

namespace {

Configuration make(std::optional<std::size_t> a, FusionLayer b, CombinationLayer c) {
    Configuration cfg;
    cfg.pca_dim = a;
    cfg.fusion = b;
    cfg.combination = c;
    return cfg;
}

bool mentions(const std::vector<std::string>& violations, const std::string& needle) {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

std::pair<EmbeddingTable, EmbeddingTable> toy_tables(std::size_t n, Eigen::Index dt, Eigen::Index dv,
                                                     std::uint64_t seed) {
    auto vocab = std::make_shared<const Vocabulary>(fixtures::words(n));
    const auto rows = static_cast<Eigen::Index>(n);
    return {EmbeddingTable(vocab, fixtures::random_matrix(rows, dt, seed), "textual"),
            EmbeddingTable(vocab, fixtures::random_matrix(rows, dv, seed + 1), "visual")};
}

}  // namespace

TEST_CASE("validate_configuration: unequal widths block CCA") {
    const auto v = validate_configuration(make(std::nullopt, CcaFusion{50, Side::textual}, NoCombination{}),
                                          500, 4096);
    CHECK(mentions(v, "same dimensionality"));
}

TEST_CASE("validate_configuration: the MEN Best configuration is valid") {
    const auto cfg = make(200, CcaPlusRcca{200, Modality::visual, Modality::textual}, Interpolate{0.4});
    CHECK(validate_configuration(cfg, 500, 4096).empty());
}

TEST_CASE("validate_configuration: layer c requirements") {
    CHECK(mentions(validate_configuration(
                       make(100, CcaPlusRcca{50, Modality::visual, Modality::textual}, NoCombination{}),
                       500, 4096),
                   "must be consumed"));
    CHECK(mentions(validate_configuration(make(std::nullopt, NoFusion{Side::textual}, Concat{}), 5, 6),
                   "needs two input tables"));
    CHECK(mentions(validate_configuration(make(std::nullopt, NoFusion{Side::both}, NoCombination{}), 5, 6),
                   "no combination motif"));
    CHECK(mentions(validate_configuration(make(std::nullopt, NoFusion{Side::both}, Interpolate{1.5}), 5, 6),
                   "LI weight"));
    CHECK(validate_configuration(make(std::nullopt, NoFusion{Side::visual}, NoCombination{}), 5, 6).empty());
    CHECK(validate_configuration(make(std::nullopt, NoFusion{Side::both}, Interpolate{0.3}), 5, 6).empty());
}

TEST_CASE("validate_configuration: dimension bounds") {
    CHECK(mentions(validate_configuration(make(600, NoFusion{Side::textual}, NoCombination{}), 500, 4096),
                   "exceeds textual dimension"));
    CHECK(mentions(validate_configuration(make(100, CcaFusion{150, Side::visual}, NoCombination{}), 500, 4096),
                   "exceeds input dimension"));
    auto bad_ridge = make(std::nullopt, NoFusion{Side::textual}, NoCombination{});
    bad_ridge.ridge = -1;
    CHECK(mentions(validate_configuration(bad_ridge, 5, 5), "ridge"));
}

TEST_CASE("output_dimension") {
    CHECK(output_dimension(make(std::nullopt, NoFusion{Side::visual}, NoCombination{}), 500, 4096) == 4096);
    CHECK(output_dimension(make(std::nullopt, NoFusion{Side::both}, Concat{}), 500, 4096) == 4596);
    CHECK(output_dimension(make(std::nullopt, NoFusion{Side::both}, Interpolate{0.5}), 500, 4096) == 4096);
    CHECK(output_dimension(make(200, CcaPlusRcca{150, Modality::visual, Modality::textual}, Interpolate{0.4}),
                           500, 4096) == 150);
    CHECK(output_dimension(make(200, RccaFusion{50, Side::both}, Concat{}), 500, 4096) == 100);
}

TEST_CASE("configuration text form") {
    const auto men = make(200, CcaPlusRcca{200, Modality::visual, Modality::textual}, Interpolate{0.4});
    CHECK(format_configuration(men) ==
          "layer_a=pca:200\nlayer_b=cca_plus_rcca:200:cca=V:rcca=T\nlayer_c=li:0.4\nridge=0.001\n");
    CHECK(format_configuration_inline(men) ==
          "layer_a=pca:200 layer_b=cca_plus_rcca:200:cca=V:rcca=T layer_c=li:0.4 ridge=0.001");
    CHECK(describe_configuration(men) == "PCA (200) / CCA (V,200) + R-CCA (T,200) / LI (0.4)");
    CHECK(parse_configuration(format_configuration(men)) == men);
    CHECK(parse_configuration(format_configuration_inline(men)) == men);

    const auto parsed = parse_configuration("# comment\nlayer_b=none:V\n\n");
    CHECK(parsed == make(std::nullopt, NoFusion{Side::visual}, NoCombination{}));

    CHECK_THROWS_AS(parse_configuration("layer_a=none"), ParseError);
    CHECK_THROWS_AS(parse_configuration("layer_b=cca:0:T"), ParseError);
    CHECK_THROWS_AS(parse_configuration("layer_b=cca:10:X"), ParseError);
    CHECK_THROWS_AS(parse_configuration("layer_b=none:T\nlayer_b=none:V"), ParseError);
    CHECK_THROWS_AS(parse_configuration("layer_b=none:T\nfoo=1"), ParseError);
    CHECK_THROWS_AS(parse_configuration("layer_b=none:T layer_c=li:x"), ParseError);
    try {
        parse_configuration("layer_b=none:T\nlayer_c=bogus\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("every enumerated configuration round-trips through the text form (property)") {
    GridSpec grid;
    grid.dim_min = 1;
    grid.dim_step = 2;
    grid.alpha_step = 0.05;
    grid.ridge = 2.5e-4;
    for (const auto& c : enumerate_configurations(5, 5, grid)) {
        const auto text = format_configuration(c);
        const auto back = parse_configuration(text);
        CHECK(back == c);
        CHECK(format_configuration(back) == text);
    }
}

TEST_CASE("motif sets") {
    CHECK(parse_motifs("li") == MotifSet{Motif::li});
    CHECK(parse_motifs("pca, cca,rcca") == MotifSet{Motif::pca, Motif::cca, Motif::rcca});
    CHECK(format_motifs(parse_motifs("li,pca")) == "pca,li");
    CHECK_THROWS_AS(parse_motifs("svd"), ParseError);
    const auto men = make(200, CcaPlusRcca{200, Modality::visual, Modality::textual}, Interpolate{0.4});
    CHECK(motifs_of(men) == MotifSet{Motif::pca, Motif::cca, Motif::rcca, Motif::li});
}

TEST_CASE("enumerate_configurations count matches the hand enumeration") {
    GridSpec grid;
    grid.alpha_step = 0.5;
    const auto configs = enumerate_configurations(100, 100, grid);
    CHECK(configs.size() == oracle::kTinyGridCount);

    // Independent cross-check: brute-force the raw product of layer options and
    // keep what validation accepts.
    std::vector<std::optional<std::size_t>> as{std::nullopt, 50, 100};
    std::vector<FusionLayer> bs;
    for (Side s : {Side::textual, Side::visual, Side::both}) {
        bs.emplace_back(NoFusion{s});
        for (std::size_t k : {50, 100}) {
            bs.emplace_back(CcaFusion{k, s});
            bs.emplace_back(RccaFusion{k, s});
        }
    }
    for (std::size_t k : {50, 100}) {
        for (auto cs : {Modality::textual, Modality::visual}) {
            for (auto rs : {Modality::textual, Modality::visual}) bs.emplace_back(CcaPlusRcca{k, cs, rs});
        }
    }
    std::vector<CombinationLayer> cs{NoCombination{}, Concat{}, Interpolate{0.0}, Interpolate{0.5},
                                     Interpolate{1.0}};
    std::size_t valid = 0;
    for (const auto& a : as) {
        for (const auto& b : bs) {
            for (const auto& c : cs) valid += validate_configuration(make(a, b, c), 100, 100).empty();
        }
    }
    CHECK(valid == oracle::kTinyGridCount);
}

TEST_CASE("enumerate_configurations is canonical, valid and duplicate-free") {
    GridSpec grid;
    grid.dim_min = 1;
    grid.dim_step = 1;
    const auto configs = enumerate_configurations(4, 4, grid);
    CHECK(configs.size() == 1134);
    std::set<std::string> seen;
    for (const auto& c : configs) {
        CHECK(validate_configuration(c, 4, 4).empty());
        CHECK(seen.insert(format_configuration(c)).second);
    }
    CHECK(format_configuration_inline(configs.front()) ==
          "layer_a=none layer_b=none:T layer_c=none ridge=0.001");
    CHECK(format_configuration_inline(configs.back()) ==
          "layer_a=pca:4 layer_b=cca_plus_rcca:4:cca=V:rcca=V layer_c=li:1 ridge=0.001");
    // Layer-a dimension is the outermost key.
    std::size_t last_a = 0;
    for (const auto& c : configs) {
        CHECK(c.pca_dim.value_or(0) >= last_a);
        last_a = c.pca_dim.value_or(0);
    }
}

TEST_CASE("enumerate_configurations respects the same-dimensionality rule") {
    const auto configs = enumerate_configurations(500, 4096, GridSpec{});
    for (const auto& c : configs) {
        if (!c.pca_dim) CHECK(std::holds_alternative<NoFusion>(c.fusion));
        if (std::holds_alternative<CcaPlusRcca>(c.fusion)) {
            CHECK_FALSE(std::holds_alternative<NoCombination>(c.combination));
        }
    }
    // Layer-a PCA stops at the smaller input width.
    std::size_t max_a = 0;
    for (const auto& c : configs) max_a = std::max(max_a, c.pca_dim.value_or(0));
    CHECK(max_a == 500);
}

TEST_CASE("enumerate_configurations grid errors and motif filter") {
    GridSpec bad;
    bad.dim_step = 0;
    CHECK_THROWS_AS(enumerate_configurations(10, 10, bad), GridError);
    bad = GridSpec{};
    bad.alpha_step = 0;
    CHECK_THROWS_AS(enumerate_configurations(10, 10, bad), GridError);

    GridSpec li_only;
    li_only.motif_filter = MotifSet{Motif::li};
    const auto configs = enumerate_configurations(500, 4096, li_only);
    CHECK(configs.size() == 11);
    for (const auto& c : configs) {
        CHECK_FALSE(c.pca_dim);
        CHECK(std::get<NoFusion>(c.fusion).side == Side::both);
        CHECK(std::holds_alternative<Interpolate>(c.combination));
    }
}

TEST_CASE("enumeration depends only on widths and grid") {
    GridSpec grid;
    grid.dim_min = 1;
    grid.dim_step = 1;
    const auto a = enumerate_configurations(3, 3, grid);
    const auto b = enumerate_configurations(3, 3, grid);
    CHECK(a == b);
}

TEST_CASE("apply_configuration: baselines") {
    const auto [t, v] = toy_tables(12, 4, 6, 5);

    const auto visual = apply_configuration(make(std::nullopt, NoFusion{Side::visual}, NoCombination{}), t, v);
    REQUIRE_FALSE(visual.is_pair());
    CHECK(visual.single().table.matrix() == v.matrix());

    const auto li = apply_configuration(make(std::nullopt, NoFusion{Side::both}, Interpolate{0.3}), t, v);
    REQUIRE(li.is_pair());
    CHECK(li.pair().first.matrix() == t.matrix());
    CHECK(li.pair().second.matrix() == v.matrix());
    CHECK(li.pair().alpha == 0.3);
    CHECK(li.output_dim() == 6);

    const auto pca = apply_configuration(make(3, NoFusion{Side::textual}, NoCombination{}), t, v);
    CHECK(pca.single().table.matrix() == pca_transform(pca_fit(t.matrix(), 3), t.matrix()));

    const auto concat = apply_configuration(make(std::nullopt, NoFusion{Side::both}, Concat{}), t, v);
    CHECK(concat.output_dim() == 10);
    CHECK(concat.single().table.matrix().leftCols(4) == t.matrix());
    CHECK(concat.single().table.matrix().rightCols(6) == v.matrix());
}

TEST_CASE("apply_configuration: fusion outputs") {
    const auto [t, v] = toy_tables(20, 5, 5, 9);
    const auto model = cca_fit(t.matrix(), v.matrix(), 3);
    const Matrix tp = cca_transform(model, t.matrix(), Modality::textual);
    const Matrix vp = cca_transform(model, v.matrix(), Modality::visual);
    const auto reduce_t = pca_fit(t.matrix(), 3);
    const Matrix rt = rcca_residual(t.matrix(), tp, &reduce_t);

    const auto cca_v = apply_configuration(make(std::nullopt, CcaFusion{3, Side::visual}, NoCombination{}), t, v);
    CHECK(cca_v.single().table.matrix() == vp);

    const auto r_t = apply_configuration(make(std::nullopt, RccaFusion{3, Side::textual}, NoCombination{}), t, v);
    CHECK(r_t.single().table.matrix() == rt);

    // CCA(V) + R-CCA(T): textual-derived residual comes first and carries alpha.
    const auto mix = apply_configuration(
        make(std::nullopt, CcaPlusRcca{3, Modality::visual, Modality::textual}, Interpolate{0.4}), t, v);
    CHECK(mix.pair().first.matrix() == rt);
    CHECK(mix.pair().second.matrix() == vp);

    // Same modality on both: the CCA output leads.
    const auto same = apply_configuration(
        make(std::nullopt, CcaPlusRcca{3, Modality::textual, Modality::textual}, Concat{}), t, v);
    CHECK(same.single().table.matrix().leftCols(3) == tp);
    CHECK(same.single().table.matrix().rightCols(3) == rt);

    // Equal widths skip the reducing PCA.
    const auto full = apply_configuration(make(std::nullopt, RccaFusion{5, Side::visual}, NoCombination{}), t, v);
    const auto model5 = cca_fit(t.matrix(), v.matrix(), 5);
    CHECK(full.single().table.matrix() == v.matrix() - cca_transform(model5, v.matrix(), Modality::visual));
}

TEST_CASE("apply_configuration: normalized concatenation") {
    const auto [t, v] = toy_tables(8, 2, 3, 4);
    auto cfg = make(std::nullopt, NoFusion{Side::both}, Concat{});
    cfg.normalize_concat = true;
    const auto m = apply_configuration(cfg, t, v).single().table.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        CHECK(m.row(i).leftCols(2).norm() == doctest::Approx(1.0));
        CHECK(m.row(i).rightCols(3).norm() == doctest::Approx(1.0));
    }
}

TEST_CASE("apply_configuration keeps the vocabulary and is deterministic") {
    const auto [t, v] = toy_tables(15, 4, 4, 21);
    GridSpec grid;
    grid.dim_min = 1;
    grid.dim_step = 1;
    grid.alpha_step = 0.5;
    FitCache cache(t, v);
    for (const auto& c : enumerate_configurations(4, 4, grid)) {
        const auto a = apply_configuration(c, cache);
        const auto b = apply_configuration(c, t, v);
        CHECK(a.vocab() == t.vocab());
        CHECK(a.output_dim() == output_dimension(c, 4, 4));
        if (a.is_pair()) {
            CHECK(a.pair().first.matrix() == b.pair().first.matrix());
            CHECK(a.pair().second.matrix() == b.pair().second.matrix());
        } else {
            CHECK(a.single().table.matrix() == b.single().table.matrix());
        }
    }
}

TEST_CASE("apply_configuration errors") {
    const auto [t, v] = toy_tables(10, 4, 6, 3);
    CHECK_THROWS_AS(apply_configuration(make(std::nullopt, CcaFusion{2, Side::textual}, NoCombination{}), t, v),
                    ValidationError);
    const EmbeddingTable other(fixtures::words(10, "x"), fixtures::random_matrix(10, 6, 1));
    CHECK_THROWS_AS(apply_configuration(make(std::nullopt, NoFusion{Side::textual}, NoCombination{}), t, other),
                    AlignmentError);
    // Fusion dimension beyond n - 1 surfaces the numerics error.
    const auto [t3, v3] = toy_tables(3, 4, 4, 8);
    CHECK_THROWS_AS(apply_configuration(make(std::nullopt, CcaFusion{3, Side::textual}, NoCombination{}), t3, v3),
                    DimensionError);
}

TEST_CASE("FitCache computes each layer once under concurrency") {
    const auto [t, v] = toy_tables(30, 6, 6, 77);
    FitCache cache(t, v);
    std::vector<std::jthread> pool;
    std::vector<std::shared_ptr<const FitCache::TablePair>> got(8);
    for (int w = 0; w < 8; ++w) {
        pool.emplace_back([&, w] { got[w] = cache.residual_layer(4, 2, 1e-3); });
    }
    pool.clear();
    for (int w = 1; w < 8; ++w) CHECK(got[w] == got[0]);
    // data(pca 4) + cca + residual
    CHECK(cache.computed() == 3);
}
