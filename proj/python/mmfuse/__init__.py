"""Multimodal word-embedding fusion: PCA, CCA, residual CCA, concatenation and
score interpolation, with Spearman evaluation and exhaustive grid search."""

from ._mmfuse import (
    DEFAULT_RIDGE,
    AlignmentError,
    Benchmark,
    CcaModel,
    Configuration,
    DimensionError,
    EmbeddingTable,
    GridError,
    IoError,
    LookupError,
    MmfuseError,
    NoResultError,
    NumericalError,
    ParseError,
    PcaModel,
    ScoringModel,
    SearchReport,
    UndefinedCorrelation,
    ValidationError,
    align_vocabularies,
    apply_configuration,
    cca_fit,
    cca_transform,
    cosine,
    enumerate_configurations,
    evaluate,
    grid_search,
    load_benchmark,
    load_embeddings,
    pca_fit,
    pca_transform,
    rcca_residual,
    save_embeddings,
    spearman,
)

__version__ = "0.1.0"
