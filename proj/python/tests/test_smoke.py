import math
import os
from pathlib import Path

import numpy as np
import pytest

import mmfuse

DATA = Path(os.environ.get("MMFUSE_TEST_DATA", Path(__file__).resolve().parents[2] / "tests" / "data")) / "planted"


@pytest.fixture(scope="module")
def planted():
    t, v = mmfuse.align_vocabularies(
        mmfuse.load_embeddings(str(DATA / "text.vec"), "textual"),
        mmfuse.load_embeddings(str(DATA / "image.vec"), "visual"),
    )
    return t, v, mmfuse.load_benchmark(str(DATA / "bench.tsv"))


def test_tables_round_trip_numpy(tmp_path):
    m = np.arange(6, dtype=float).reshape(3, 2) / 4
    t = mmfuse.EmbeddingTable(["a", "b", "c"], m, "toy")
    assert len(t) == 3 and t.dim == 2 and "b" in t
    np.testing.assert_array_equal(t.matrix, m)
    mmfuse.save_embeddings(t, str(tmp_path / "t.vec"))
    back = mmfuse.load_embeddings(str(tmp_path / "t.vec"))
    assert back.words == ["a", "b", "c"]
    np.testing.assert_allclose(back.matrix, m)


def test_numerics():
    x = np.array([[1, 2, 3], [2, 4, 1], [3, 1, 2], [4, 3, 4]], dtype=float)
    pca = mmfuse.pca_fit(x, 2)
    np.testing.assert_allclose(pca.explained_variance, [2.4120226591665963, 1.6666666666666672], atol=1e-8)
    scores = mmfuse.pca_transform(pca, x)
    assert scores.shape == (4, 2)

    rng = np.random.default_rng(0)
    a = rng.normal(size=(40, 3))
    b = a @ rng.normal(size=(3, 3)) + 0.1 * rng.normal(size=(40, 3))
    cca = mmfuse.cca_fit(a, b, 2)
    assert cca.k == 2 and 0.9 < cca.correlations[0] <= 1.0
    pa = mmfuse.cca_transform(cca, a, "textual")
    resid = mmfuse.rcca_residual(a[:, :2], pa)
    np.testing.assert_allclose(resid + pa, a[:, :2], atol=1e-12)
    with pytest.raises(mmfuse.DimensionError):
        mmfuse.rcca_residual(a, pa)


def test_configuration_text_form():
    cfg = mmfuse.Configuration.parse("layer_a=pca:200 layer_b=cca_plus_rcca:200:cca=V:rcca=T layer_c=li:0.4")
    assert cfg.describe() == "PCA (200) / CCA (V,200) + R-CCA (T,200) / LI (0.4)"
    assert mmfuse.Configuration.parse(cfg.format()) == cfg
    assert cfg.validate(500, 4096) == []
    assert cfg.output_dimension(500, 4096) == 200
    with pytest.raises(mmfuse.ParseError):
        mmfuse.Configuration.parse("layer_b=bogus")
    assert len(mmfuse.enumerate_configurations(500, 4096, motifs="li")) == 11


def test_evaluation(planted):
    t, v, bench = planted
    model = mmfuse.apply_configuration(mmfuse.Configuration.parse("layer_b=none:T"), t, v)
    r = mmfuse.evaluate(model, bench)
    assert r["rho"] == pytest.approx(1.0) and r["n_evaluated"] == 60 and r["n_total"] == 64
    assert mmfuse.spearman([1, 2, 2, 4], [1, 3, 2, 4]) == pytest.approx(3 / math.sqrt(10), abs=1e-12)
    assert mmfuse.cosine(np.array([1.0, 0.0]), np.array([1.0, 1.0])) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(mmfuse.UndefinedCorrelation):
        mmfuse.spearman([1, 1, 1], [1, 2, 3])

    li = mmfuse.apply_configuration(mmfuse.Configuration.parse("layer_b=none:both layer_c=li:0.4"), t, v)
    assert li.is_pair and li.alpha == 0.4 and len(li.tables) == 2


def test_grid_search(planted):
    t, v, bench = planted
    one = mmfuse.grid_search(t, v, bench, dim_min=1, dim_step=1)
    many = mmfuse.grid_search(t, v, bench, dim_min=1, dim_step=1, workers=4)
    assert len(one) == 1134 and one.failed == 0
    assert one.entries_tsv() == many.entries_tsv()
    best = one.best()
    assert str(best["config"]) == "layer_a=none layer_b=none:T layer_c=none ridge=0.001"
    assert best["rho"] == pytest.approx(1.0)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        mmfuse.load_embeddings("/nonexistent/file.vec")
    with pytest.raises(mmfuse.ValidationError):
        mmfuse.apply_configuration(
            mmfuse.Configuration.parse("layer_b=cca:1:T"),
            mmfuse.EmbeddingTable(["a", "b", "c"], np.eye(3)),
            mmfuse.EmbeddingTable(["a", "b", "c"], np.eye(3)[:, :2]),
        )
    with pytest.raises(mmfuse.ParseError):
        mmfuse.Benchmark("b", [("a", "b", 1.0), ("b", "a", 2.0)])
