"""End-to-end alignment runs: preprocess, optionally self-learn, solve, rotate, project.

This is the library-level entry point the command line wraps.  It returns the
alignment artifacts together with stage timings and the preprocessed
embeddings so callers can evaluate retrieval in the space the alignment was
fit in.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import align, core
from .embio import Embedding, SeedDictionary
from .preprocess import PreprocessMode, preprocess_pair
from .selflearn import AugmentationConfig, augment_dictionary

METHODS = ("fipp", "procrustes", "linear")
ROTATIONS = ("weighted", "plain", "none")


@dataclass(frozen=True)
class AlignmentOptions:
    preprocess: PreprocessMode = PreprocessMode()
    fipp: core.FippConfig = core.FippConfig()
    method: str = "fipp"
    rotation: str = "weighted"
    weight_floor: float = 1e-6
    self_learning: int = 0
    eigen_method: str = "auto"

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.rotation not in ROTATIONS:
            raise ValueError(f"unknown rotation {self.rotation!r}; choose from {ROTATIONS}")
        if self.weight_floor <= 0:
            raise ValueError("weight_floor must be > 0")
        if self.self_learning < 0:
            raise ValueError("self_learning must be >= 0")


@dataclass
class PipelineRun:
    """Alignment output plus run metadata for reports and diagnostics."""

    result: align.AlignmentResult
    src_processed: Embedding
    tgt_processed: Embedding
    seed: SeedDictionary
    timings: dict[str, float]
    mask: core.FilterMask | None = None
    grams: dict[str, np.ndarray] = field(default_factory=dict)
    lambda_eff: float | None = None
    projection_cond: float | None = None
    sgd_trace: np.ndarray | None = None
    self_learning_added: int = 0

    @property
    def aligned_embedding(self) -> Embedding:
        return Embedding(self.src_processed.vocab, self.result.full_aligned)


class _StageClock:
    def __init__(self) -> None:
        self.timings: dict[str, float] = {}
        self._start = 0.0

    def start(self) -> None:
        self._start = time.perf_counter()

    def stop(self, name: str) -> None:
        self.timings[name] = time.perf_counter() - self._start


def align_embeddings(
    src: Embedding,
    tgt: Embedding,
    seed: SeedDictionary,
    options: AlignmentOptions = AlignmentOptions(),
) -> PipelineRun:
    """Run one full alignment and return artifacts plus per-stage wall times."""
    clock = _StageClock()

    clock.start()
    src_p, tgt_p = preprocess_pair(src, tgt, options.preprocess)
    clock.stop("preprocess")

    added = 0
    if options.self_learning > 0:
        clock.start()
        before = len(seed)
        seed = augment_dictionary(
            src_p, tgt_p, seed, AugmentationConfig(n_pairs=options.self_learning)
        )
        added = len(seed) - before
        clock.stop("selflearn")

    seed_src = src_p.matrix[seed.src_indices]
    seed_tgt = tgt_p.matrix[seed.tgt_indices]

    if options.method == "procrustes":
        result, extras = _baseline_procrustes(src_p, seed_src, seed_tgt, clock)
    elif options.method == "linear":
        result, extras = _baseline_linear(src_p, seed_src, seed_tgt, clock)
    else:
        result, extras = _fipp_solve(src_p, seed_src, seed_tgt, options, clock)

    return PipelineRun(
        result=result,
        src_processed=src_p,
        tgt_processed=tgt_p,
        seed=seed,
        timings=clock.timings,
        self_learning_added=added,
        **extras,
    )


def _fipp_solve(
    src_p: Embedding,
    seed_src: np.ndarray,
    seed_tgt: np.ndarray,
    options: AlignmentOptions,
    clock: _StageClock,
) -> tuple[align.AlignmentResult, dict]:
    cfg = options.fipp
    d2 = seed_tgt.shape[1]

    clock.start()
    gs = core.gram(seed_src)
    gt = core.gram(seed_tgt)
    clock.stop("gram")

    clock.start()
    mask = core.filter_mask(gs, gt, cfg.epsilon)
    lambda_eff = core.effective_lambda(cfg.lam, mask, cfg.gamma_scaling)
    gstar = core.closed_form_gstar(gs, gt, mask, lambda_eff)
    clock.stop("gstar")

    clock.start()
    sgd_trace = None
    if cfg.solver == "sgd":
        init = seed_src if seed_src.shape[1] == d2 else None
        solved = core.sgd_solve(
            init,
            gs,
            gt,
            mask,
            lambda_eff,
            epochs=cfg.sgd_epochs,
            lr=cfg.sgd_learning_rate,
            seed=cfg.rng_seed,
            d2=d2,
        )
        seed_aligned = solved.matrix
        sgd_trace = solved.loss_trace
    else:
        seed_aligned = core.low_rank_psd_factor(gstar, d2, method=options.eigen_method)
    losses = core.fipp_loss(seed_aligned, gs, gt, mask, lambda_eff)
    clock.stop("factor")

    clock.start()
    if options.rotation == "weighted":
        weights = align.residual_weights(seed_aligned, seed_tgt, floor=options.weight_floor)
    else:
        weights = np.ones(seed_aligned.shape[0])
    if options.rotation == "none":
        rotation = np.eye(d2)
    else:
        rotation = align.weighted_procrustes(seed_aligned, seed_tgt, weights)
    clock.stop("rotate")

    clock.start()
    projected, cond = align.least_squares_project(
        seed_aligned, seed_src, src_p.matrix, return_cond=True
    )
    full_aligned = projected @ rotation
    clock.stop("project")

    if seed_src.shape[1] == d2:
        deviation = align.orthogonal_deviation(seed_aligned, seed_src)
    else:
        deviation = None

    result = align.AlignmentResult(
        seed_aligned=seed_aligned @ rotation,
        rotation=rotation,
        weights=weights,
        full_aligned=full_aligned,
        losses=losses,
        ortho_deviation=deviation,
    )
    extras = {
        "mask": mask,
        "grams": {"source": gs, "target": gt, "blended": gstar},
        "lambda_eff": lambda_eff,
        "projection_cond": cond,
        "sgd_trace": sgd_trace,
    }
    return result, extras


def _baseline_procrustes(
    src_p: Embedding, seed_src: np.ndarray, seed_tgt: np.ndarray, clock: _StageClock
) -> tuple[align.AlignmentResult, dict]:
    if seed_src.shape[1] != seed_tgt.shape[1]:
        raise ValueError("plain Procrustes needs equal source and target dimensions")
    clock.start()
    rotation = align.procrustes(seed_src, seed_tgt)
    clock.stop("rotate")
    clock.start()
    full_aligned = src_p.matrix @ rotation
    clock.stop("project")
    result = align.AlignmentResult(
        seed_aligned=seed_src @ rotation,
        rotation=rotation,
        weights=np.ones(seed_src.shape[0]),
        full_aligned=full_aligned,
        losses=None,
        ortho_deviation=0.0,
    )
    return result, {}


def _baseline_linear(
    src_p: Embedding, seed_src: np.ndarray, seed_tgt: np.ndarray, clock: _StageClock
) -> tuple[align.AlignmentResult, dict]:
    clock.start()
    linear_map = align.orthonormal_linear_map(seed_src, seed_tgt)
    clock.stop("rotate")
    clock.start()
    full_aligned = src_p.matrix @ linear_map
    clock.stop("project")
    result = align.AlignmentResult(
        seed_aligned=seed_src @ linear_map,
        rotation=linear_map,
        weights=np.ones(seed_src.shape[0]),
        full_aligned=full_aligned,
        losses=None,
        ortho_deviation=None,
    )
    return result, {}
