"""Extend a seed alignment to the full vocabulary and rotate it into the target basis.

The projection solves, for every vocabulary word, a least-squares system that
preserves its inner products with the seed words.  The rotation is a weighted
orthogonal Procrustes fit whose per-pair weights downweight poorly transferred
translation pairs.  Plain Procrustes and a row-orthonormal linear map are kept
as baselines, along with orthogonality and Gram-distance diagnostics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import LossBreakdown

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlignmentResult:
    """Everything produced by one alignment run.

    ``rotation`` is the map applied after projection: an orthogonal d2 x d2
    matrix for Gram-based alignment and plain Procrustes, or a row-orthonormal
    d1 x d2 matrix for the linear baseline.  ``losses`` is None for baseline
    methods that do not optimize the Gram objective.
    """

    seed_aligned: np.ndarray
    rotation: np.ndarray
    weights: np.ndarray
    full_aligned: np.ndarray
    losses: LossBreakdown | None
    ortho_deviation: float | None


def least_squares_project(
    seed_aligned: np.ndarray,
    seed_src: np.ndarray,
    full_src: np.ndarray,
    rcond: float = 1e-10,
    block_size: int = 4096,
    return_cond: bool = False,
) -> np.ndarray | tuple[np.ndarray, float]:
    """Infer aligned vectors for the whole vocabulary from the aligned seed.

    Solves ``min_M || seed_aligned @ M.T - seed_src @ full_src.T ||_F`` so each
    word keeps its seed inner products.  One SVD of ``seed_aligned`` is reused
    across all vocabulary columns; singular values below ``rcond * sigma_max``
    are dropped, which yields the minimum-norm solution for rank-deficient
    seeds.  Vocabulary columns are processed in blocks to bound memory.
    """
    c, d2 = seed_aligned.shape
    if seed_src.shape[0] != c:
        raise ValueError(f"seed_src has {seed_src.shape[0]} rows, seed_aligned has {c}")
    n = full_src.shape[0]
    u, sigma, vt = np.linalg.svd(seed_aligned, full_matrices=False)
    cutoff = rcond * (sigma[0] if sigma.size else 0.0)
    keep = sigma > cutoff
    inv_sigma = np.where(keep, 1.0 / np.where(keep, sigma, 1.0), 0.0)
    cond = float(sigma[0] / sigma[keep][-1]) if keep.any() else float("inf")
    logger.debug("projection: rank %d of %d, condition number %.3e", int(keep.sum()), d2, cond)

    solve = (vt.T * inv_sigma) @ u.T  # d2 x c pseudo-inverse of seed_aligned
    out = np.empty((n, d2))
    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        targets = seed_src @ full_src[start:stop].T  # c x block
        out[start:stop] = (solve @ targets).T
    if return_cond:
        return out, cond
    return out


def residual_weights(
    seed_aligned: np.ndarray,
    tgt_seed: np.ndarray,
    floor: float = 1e-6,
    formula: str = "transfer",
    seed_src: np.ndarray | None = None,
) -> np.ndarray:
    """Per-pair weights from inverse transfer residuals, rescaled to max 1.

    ``formula="transfer"`` measures each pair's residual against the aligned
    seed Gram, ``|| seed_aligned[i] @ seed_aligned.T - tgt_seed[i] @ tgt_seed.T ||^2``.
    ``formula="literal"`` instead uses the source seed on the left-hand side
    (requires ``seed_src`` with matching width).
    """
    if floor <= 0:
        raise ValueError("floor must be > 0")
    if formula == "transfer":
        residual_rows = seed_aligned @ seed_aligned.T - tgt_seed @ tgt_seed.T
    elif formula == "literal":
        if seed_src is None:
            raise ValueError("formula='literal' requires seed_src")
        if seed_src.shape[1] != seed_aligned.shape[1]:
            raise ValueError("literal residual needs equal source and aligned widths")
        residual_rows = seed_aligned @ seed_src.T - tgt_seed @ tgt_seed.T
    else:
        raise ValueError(f"unknown residual formula {formula!r}")
    residuals = np.sum(residual_rows**2, axis=1)
    weights = 1.0 / np.maximum(residuals, floor)
    return weights / weights.max()


def weighted_procrustes(
    seed_aligned: np.ndarray, tgt_seed: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """Orthogonal matrix minimizing ``|| diag(w) (seed_aligned @ R - tgt_seed) ||_F``.

    Computed from the SVD of ``(W A)^T (W B)``: with that product U S V^T, the
    minimizer is U V^T.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or weights.shape[0] != seed_aligned.shape[0]:
        raise ValueError("weights must be a vector with one entry per seed pair")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        raise ValueError("weights must be positive and finite")
    weighted_a = weights[:, None] * seed_aligned
    weighted_b = weights[:, None] * tgt_seed
    u, _, vt = np.linalg.svd(weighted_a.T @ weighted_b)
    return u @ vt


def procrustes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Orthogonal matrix minimizing ``|| a @ R - b ||_F`` (unit-weight case)."""
    if a.shape != b.shape:
        raise ValueError(f"shapes differ: {a.shape} vs {b.shape}")
    return weighted_procrustes(a, b, np.ones(a.shape[0]))


def orthonormal_linear_map(src_seed: np.ndarray, tgt_seed: np.ndarray) -> np.ndarray:
    """Best d1 x d2 map with orthonormal rows taking the source seed to the target.

    Requires d1 <= d2; reduces to plain Procrustes when d1 == d2.
    """
    d1, d2 = src_seed.shape[1], tgt_seed.shape[1]
    if d1 > d2:
        raise ValueError(f"source width {d1} exceeds target width {d2}")
    u, _, vt = np.linalg.svd(src_seed.T @ tgt_seed, full_matrices=False)
    return u @ vt


def orthogonal_deviation(seed_aligned: np.ndarray, seed_src: np.ndarray) -> float:
    """Relative distance of the aligned seed from the best orthogonal image of the source."""
    if seed_aligned.shape != seed_src.shape:
        raise ValueError(
            f"deviation needs equal shapes, got {seed_aligned.shape} vs {seed_src.shape}"
        )
    source_norm = float(np.linalg.norm(seed_src))
    if source_norm == 0:
        raise ValueError("source seed matrix has zero norm")
    rotation = procrustes(seed_src, seed_aligned)
    return float(np.linalg.norm(seed_aligned - seed_src @ rotation)) / source_norm


def pip_distance(e: np.ndarray, f: np.ndarray) -> float:
    """Frobenius distance between the two Gram matrices; invariant to rotations."""
    if e.shape[0] != f.shape[0]:
        raise ValueError(f"row counts differ: {e.shape[0]} vs {f.shape[0]}")
    return float(np.linalg.norm(e @ e.T - f @ f.T))
