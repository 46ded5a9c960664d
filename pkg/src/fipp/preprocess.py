"""Make two embeddings comparable at the Gram-matrix level.

The isotropic recipe is row normalization, column demeaning, then removal of
the top principal components of each embedding; iterative normalization
alternates normalize/demean a fixed number of times and is kept as an
ablation mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .embio import Embedding

_KINDS = ("none", "isotropic", "iterative_norm")


@dataclass(frozen=True)
class PreprocessMode:
    kind: str = "isotropic"
    iterations: int = 5          # iterative_norm only
    components_removed: int = 1  # isotropic only

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown preprocessing kind {self.kind!r}; choose from {_KINDS}")
        if self.kind == "iterative_norm" and self.iterations < 1:
            raise ValueError("iterative_norm needs iterations >= 1")
        if self.components_removed < 0:
            raise ValueError("components_removed must be >= 0")


def unit_normalize(emb: Embedding) -> Embedding:
    """Scale every row to unit l2 norm; zero rows are left as zero (with a warning)."""
    norms = np.linalg.norm(emb.matrix, axis=1, keepdims=True)
    zero_rows = int(np.count_nonzero(norms == 0))
    if zero_rows:
        warnings.warn(f"{zero_rows} zero-norm row(s) left unnormalized", RuntimeWarning, stacklevel=2)
    safe = np.where(norms == 0, 1.0, norms)
    return Embedding(emb.vocab, emb.matrix / safe)


def center_columns(emb: Embedding) -> Embedding:
    """Subtract the column means so that every column averages to zero."""
    return Embedding(emb.vocab, emb.matrix - emb.matrix.mean(axis=0, keepdims=True))


def remove_top_components(emb: Embedding, k: int) -> Embedding:
    """Project out the top-k right singular directions of the (centered) matrix."""
    if k >= emb.dim:
        raise ValueError(f"cannot remove {k} components from {emb.dim}-dimensional vectors")
    if k == 0:
        return Embedding(emb.vocab, emb.matrix.copy())
    _, _, vt = np.linalg.svd(emb.matrix, full_matrices=False)
    directions = vt[:k].T  # d x k
    cleaned = emb.matrix - (emb.matrix @ directions) @ directions.T
    return Embedding(emb.vocab, cleaned)


def iterative_normalize(emb: Embedding, iterations: int) -> Embedding:
    """Alternate unit row normalization and column demeaning ``iterations`` times."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    out = emb
    for _ in range(iterations):
        out = center_columns(unit_normalize(out))
        if float(np.abs(out.matrix).max(initial=0.0)) < 1e-12:
            # identical rows collapse to zero after demeaning; further passes are no-ops
            warnings.warn(
                "iterative normalization collapsed all rows to zero", RuntimeWarning, stacklevel=2
            )
            break
    return out


def preprocess_pair(
    src: Embedding, tgt: Embedding, mode: PreprocessMode
) -> tuple[Embedding, Embedding]:
    """Apply the configured preprocessing independently to each embedding."""
    if mode.kind == "none":
        return src, tgt

    def one(emb: Embedding) -> Embedding:
        if mode.kind == "isotropic":
            out = center_columns(unit_normalize(emb))
            return remove_top_components(out, mode.components_removed)
        return iterative_normalize(emb, mode.iterations)

    return one(src), one(tgt)
