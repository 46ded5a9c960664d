"""Gram-matrix alignment core: filtering, the closed-form optimum, and solvers.

The objective over the aligned seed matrix X (c x d2) is

    || X X^T - G_s ||_F^2  +  lambda_eff * || mask o (X X^T - G_t) ||_F^2

where G_s and G_t are the seed Gram matrices and ``mask`` keeps only entry
pairs whose inner products agree across the two spaces within ``epsilon``.
The entrywise minimizer over unconstrained symmetric matrices has a closed
form; a rank-d2 positive-semidefinite factorization of it yields X.  A
full-batch gradient-descent solver is provided as an alternative route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import topk_symmetric_eig


class DivergenceError(RuntimeError):
    """Gradient-descent solver produced a non-finite loss."""


@dataclass(frozen=True)
class FilterMask:
    """Symmetric binary mask selecting comparable inner products."""

    bits: np.ndarray  # bool, c x c
    epsilon: float
    nnz: int

    @property
    def size(self) -> int:
        return int(self.bits.size)

    @property
    def density(self) -> float:
        return self.nnz / self.bits.size


@dataclass(frozen=True)
class FippConfig:
    """Alignment hyperparameters.

    Recommended tuning grids: epsilon in [0.01, 0.15] and lam (before gamma
    scaling) in [0, 1.25].
    """

    epsilon: float = 0.05
    lam: float = 1.0
    gamma_scaling: bool = True
    solver: str = "eigen"
    sgd_epochs: int = 5000
    sgd_learning_rate: float = 1e-3
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.solver not in ("eigen", "sgd"):
            raise ValueError(f"unknown solver {self.solver!r}; choose 'eigen' or 'sgd'")
        if self.sgd_epochs < 1:
            raise ValueError("sgd_epochs must be >= 1")
        if self.sgd_learning_rate <= 0:
            raise ValueError("sgd_learning_rate must be > 0")


@dataclass(frozen=True)
class LossBreakdown:
    """Reconstruction and transfer terms of the alignment objective."""

    reconstruction: float
    transfer: float
    effective_lambda: float

    @property
    def total(self) -> float:
        return self.reconstruction + self.effective_lambda * self.transfer

    def to_dict(self) -> dict[str, float]:
        return {
            "reconstruction": self.reconstruction,
            "transfer": self.transfer,
            "effective_lambda": self.effective_lambda,
            "total": self.total,
        }


@dataclass(frozen=True)
class SgdResult:
    matrix: np.ndarray
    loss_trace: np.ndarray
    best_epoch: int

    @property
    def best_loss(self) -> float:
        return float(self.loss_trace[self.best_epoch])


def gram(seed_rows: np.ndarray) -> np.ndarray:
    """Pairwise inner products of the rows, exactly symmetric by construction."""
    product = seed_rows @ seed_rows.T
    return np.triu(product) + np.triu(product, 1).T


def filter_mask(gs: np.ndarray, gt: np.ndarray, epsilon: float) -> FilterMask:
    """Mark entry pairs whose inner products differ by strictly less than ``epsilon``."""
    if gs.shape != gt.shape:
        raise ValueError(f"Gram shapes differ: {gs.shape} vs {gt.shape}")
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    bits = np.abs(gs - gt) < epsilon
    return FilterMask(bits=bits, epsilon=float(epsilon), nnz=int(bits.sum()))


def effective_lambda(lam: float, mask: FilterMask, gamma_scaling: bool = True) -> float:
    """Transfer-loss weight, optionally rescaled by c^2 / nnz to offset mask sparsity."""
    if lam == 0:
        return 0.0
    if mask.nnz == 0:
        raise ValueError("empty filter mask (nnz = 0); raise epsilon")
    if not gamma_scaling:
        return float(lam)
    return float(lam) * mask.size / mask.nnz


def closed_form_gstar(
    gs: np.ndarray, gt: np.ndarray, mask: FilterMask, lambda_eff: float
) -> np.ndarray:
    """Entrywise minimizer of the objective over unconstrained symmetric matrices.

    Filtered entries blend to ``(gs + lambda_eff * gt) / (1 + lambda_eff)``;
    all others keep the source value.
    """
    if gs.shape != gt.shape or gs.shape != mask.bits.shape:
        raise ValueError("gs, gt, and mask must share the same shape")
    if lambda_eff < 0:
        raise ValueError("lambda_eff must be >= 0")
    blended = (gs + lambda_eff * gt) / (1.0 + lambda_eff)
    gstar = np.where(mask.bits, blended, gs)
    return np.triu(gstar) + np.triu(gstar, 1).T


def low_rank_psd_factor(
    gstar: np.ndarray,
    d2: int,
    method: str = "auto",
    tol: float = 1e-10,
) -> np.ndarray:
    """Factor ``gstar`` as X X^T with X of width d2, via PSD spectral truncation.

    X's columns are sqrt(eigenvalue)-scaled eigenvectors for the d2 largest
    nonnegative eigenvalues; columns beyond the available nonnegative spectrum
    are zero, so X X^T is the closest PSD matrix of rank <= d2 in Frobenius
    norm.
    """
    c = gstar.shape[0]
    if d2 < 1:
        raise ValueError("d2 must be >= 1")
    k = min(d2, c)
    values, vectors = topk_symmetric_eig(gstar, k, method=method, tol=tol)
    scales = np.sqrt(np.clip(values, 0.0, None))
    factor = np.zeros((c, d2))
    factor[:, :k] = vectors * scales
    return factor


def fipp_loss(
    xtilde: np.ndarray,
    gs: np.ndarray,
    gt: np.ndarray,
    mask: FilterMask,
    lambda_eff: float,
) -> LossBreakdown:
    """Evaluate both objective terms at the candidate factor ``xtilde``."""
    gtilde = xtilde @ xtilde.T
    reconstruction = float(np.sum((gtilde - gs) ** 2))
    transfer = float(np.sum((mask.bits * (gtilde - gt)) ** 2))
    return LossBreakdown(reconstruction, transfer, float(lambda_eff))


def sgd_solve(
    init: np.ndarray | None,
    gs: np.ndarray,
    gt: np.ndarray,
    mask: FilterMask,
    lambda_eff: float,
    epochs: int = 5000,
    lr: float = 1e-3,
    seed: int = 0,
    d2: int | None = None,
) -> SgdResult:
    """Full-batch gradient descent on the objective over a c x d2 factor.

    Starts from ``init`` (or a seeded random matrix of width ``d2`` when init
    is None) and returns the iterate with the lowest recorded loss, together
    with the per-epoch loss trace.  The run is deterministic given the seed.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if lr <= 0:
        raise ValueError("lr must be > 0")
    c = gs.shape[0]
    if init is None:
        if d2 is None:
            raise ValueError("d2 is required when no initial matrix is given")
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((c, d2)) / np.sqrt(d2)
    else:
        x = np.array(init, dtype=float)
        if x.shape[0] != c:
            raise ValueError(f"init has {x.shape[0]} rows, Gram matrices have {c}")

    mask_f = mask.bits.astype(float)
    trace = np.empty(epochs + 1)

    def loss_at(mat: np.ndarray) -> float:
        g = mat @ mat.T
        return float(np.sum((g - gs) ** 2) + lambda_eff * np.sum((mask_f * (g - gt)) ** 2))

    trace[0] = loss_at(x)
    best_epoch, best_loss, best_x = 0, trace[0], x.copy()
    # overflow on a diverging path is detected through the finiteness check
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, epochs + 1):
            g = x @ x.T
            grad = 4.0 * (g - gs) @ x + 4.0 * lambda_eff * (mask_f * (g - gt)) @ x
            x = x - lr * grad
            value = loss_at(x)
            if not np.isfinite(value):
                raise DivergenceError(
                    f"loss became non-finite at epoch {epoch}; "
                    f"try a smaller learning rate than {lr}"
                )
            trace[epoch] = value
            if value < best_loss:
                best_epoch, best_loss, best_x = epoch, value, x.copy()
    return SgdResult(matrix=best_x, loss_trace=trace, best_epoch=best_epoch)


def filter_stats(mask: FilterMask) -> np.ndarray:
    """Fraction of filtered-out (zero) entries per row, used to rank words."""
    c = mask.bits.shape[0]
    return 1.0 - mask.bits.sum(axis=1) / c


def inner_product_histogram(g: np.ndarray, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Histogram the off-diagonal Gram entries into equal-width bins.

    Returns ``(counts, edges)`` as from ``numpy.histogram``; counts sum to
    c^2 - c.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    c = g.shape[0]
    off_diagonal = g[~np.eye(c, dtype=bool)]
    if off_diagonal.size == 0:
        return np.zeros(bins, dtype=int), np.linspace(0.0, 1.0, bins + 1)
    return np.histogram(off_diagonal, bins=bins)
