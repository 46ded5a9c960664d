"""Synthetic embedding pairs with known ground-truth word correspondences."""

from __future__ import annotations

import numpy as np

from .embio import Embedding, SeedDictionary


def random_unit_vectors(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    vectors = rng.standard_normal((n, d))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def rotated_pair(
    n: int = 500,
    d1: int = 20,
    d2: int = 20,
    noise: float = 0.0,
    seed: int = 0,
) -> tuple[Embedding, Embedding]:
    """Source/target pair where word i on both sides names the same point.

    The target is a random orthogonal image of an underlying set of unit
    vectors in d2 dimensions (plus optional additive Gaussian noise applied
    after the rotation); the source keeps only the first d1 coordinates,
    renormalized, so d1 < d2 models a compressed source embedding.
    """
    if d1 > d2:
        raise ValueError("d1 must be <= d2")
    rng = np.random.default_rng(seed)
    base = random_unit_vectors(n, d2, rng)
    rotation = random_orthogonal(d2, rng)
    target = base @ rotation
    if noise > 0:
        target = target + noise * rng.standard_normal((n, d2))
    if d1 == d2:
        source = base
    else:
        source = base[:, :d1]
        source = source / np.linalg.norm(source, axis=1, keepdims=True)
    src = Embedding([f"s{i:05d}" for i in range(n)], source)
    tgt = Embedding([f"t{i:05d}" for i in range(n)], target)
    return src, tgt


def identity_dictionary(indices: np.ndarray | list[int]) -> SeedDictionary:
    """Seed dictionary pairing word i with word i for the given indices."""
    return SeedDictionary(pairs=[(int(i), int(i)) for i in indices])


def split_train_test(
    n: int, n_train: int, n_test: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint random train/test index sets drawn from ``range(n)``."""
    if n_train + n_test > n:
        raise ValueError(f"cannot draw {n_train}+{n_test} disjoint indices from {n}")
    order = np.random.default_rng(seed).permutation(n)
    return order[:n_train], order[n_train : n_train + n_test]
