"""Python bindings for the interdisciplinarity scoring library."""

from ._idr import (
    Corpus,
    IdrError,
    Model,
    compare_distance_matrices,
    cosine_distance_matrix,
    ols,
    rao_stirling,
    synth_citation,
    synth_lda,
)

__all__ = [
    "Corpus",
    "IdrError",
    "Model",
    "compare_distance_matrices",
    "cosine_distance_matrix",
    "ols",
    "rao_stirling",
    "synth_citation",
    "synth_lda",
]
