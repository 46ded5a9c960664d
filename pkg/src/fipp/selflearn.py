"""Grow a seed dictionary with high-confidence induced pairs.

Every vocabulary word is represented by its row of inner products with the
seed words on its own side; pairing each source word with its most similar
target word in that shared c-dimensional coordinate system yields candidate
translations, and the strongest ``n_pairs`` of them are appended to the seed.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .embio import Embedding, SeedDictionary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentationConfig:
    n_pairs: int = 14000
    exclude_seed: bool = True

    def __post_init__(self) -> None:
        if self.n_pairs < 0:
            raise ValueError("n_pairs must be >= 0")


@dataclass(frozen=True)
class AugmentationCandidate:
    src_index: int
    tgt_index: int
    similarity: float


def induce_candidates(
    full_src: Embedding,
    full_tgt: Embedding,
    seed: SeedDictionary,
    block_size: int = 8192,
) -> list[AugmentationCandidate]:
    """Best target match per source word in seed-inner-product coordinates.

    Feature rows are unit-normalized before matching so the scores are literal
    cosines; the result is sorted by similarity descending, ties broken by
    lower source then lower target index.
    """
    seed_src = full_src.matrix[seed.src_indices]
    seed_tgt = full_tgt.matrix[seed.tgt_indices]
    features_src = _unit_rows(full_src.matrix @ seed_src.T)
    features_tgt = _unit_rows(full_tgt.matrix @ seed_tgt.T)

    n = features_src.shape[0]
    best_target = np.empty(n, dtype=int)
    best_similarity = np.empty(n)
    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        sims = features_src[start:stop] @ features_tgt.T
        best_target[start:stop] = np.argmax(sims, axis=1)  # argmax ties -> lower index
        best_similarity[start:stop] = sims[np.arange(stop - start), best_target[start:stop]]

    source_order = np.arange(n)
    order = np.lexsort((best_target, source_order, -best_similarity))
    return [
        AugmentationCandidate(int(i), int(best_target[i]), float(best_similarity[i]))
        for i in order
    ]


def augment_dictionary(
    full_src: Embedding,
    full_tgt: Embedding,
    seed: SeedDictionary,
    cfg: AugmentationConfig,
) -> SeedDictionary:
    """Append the top ``cfg.n_pairs`` induced pairs to the seed dictionary.

    Expects row-normalized embeddings.  Original pairs come first; pairs that
    already sit in the seed are skipped when ``cfg.exclude_seed`` is set.
    Several source words may map to the same target; the collision count is
    logged.
    """
    if cfg.n_pairs == 0:
        return seed
    candidates = induce_candidates(full_src, full_tgt, seed)
    seed_set = set(seed.pairs)
    additions: list[tuple[int, int]] = []
    for cand in candidates:
        pair = (cand.src_index, cand.tgt_index)
        if cfg.exclude_seed and pair in seed_set:
            continue
        additions.append(pair)
        if len(additions) == cfg.n_pairs:
            break
    if len(additions) < cfg.n_pairs:
        warnings.warn(
            f"only {len(additions)} candidate pairs available, requested {cfg.n_pairs}",
            RuntimeWarning,
            stacklevel=2,
        )
    merged: list[tuple[int, int]] = list(seed.pairs)
    seen = set(seed.pairs)
    for pair in additions:
        if pair in seen:
            continue
        seen.add(pair)
        merged.append(pair)
    targets = [t for _, t in merged]
    collisions = len(targets) - len(set(targets))
    if collisions:
        logger.info("self-learning: %d source words share a target word", collisions)
    return SeedDictionary(pairs=merged, skipped=seed.skipped)


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / np.where(norms == 0, 1.0, norms)
