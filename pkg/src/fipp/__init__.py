"""Cross-lingual embedding alignment via filtered inner-product projection."""

__version__ = "0.1.0"

from .align import (
    AlignmentResult,
    least_squares_project,
    orthogonal_deviation,
    orthonormal_linear_map,
    pip_distance,
    procrustes,
    residual_weights,
    weighted_procrustes,
)
from .core import (
    FilterMask,
    FippConfig,
    LossBreakdown,
    closed_form_gstar,
    effective_lambda,
    filter_mask,
    filter_stats,
    fipp_loss,
    gram,
    inner_product_histogram,
    low_rank_psd_factor,
    sgd_solve,
)
from .embio import Embedding, SeedDictionary, load_dictionary, load_embeddings, save_embeddings
from .pipeline import AlignmentOptions, PipelineRun, align_embeddings
from .preprocess import (
    PreprocessMode,
    center_columns,
    iterative_normalize,
    preprocess_pair,
    remove_top_components,
    unit_normalize,
)
from .retrieval import EvalReport, csls_retrieve, evaluate, nn_retrieve
from .selflearn import AugmentationConfig, augment_dictionary

__all__ = [
    "AlignmentOptions",
    "AlignmentResult",
    "AugmentationConfig",
    "Embedding",
    "EvalReport",
    "FilterMask",
    "FippConfig",
    "LossBreakdown",
    "PipelineRun",
    "PreprocessMode",
    "SeedDictionary",
    "align_embeddings",
    "augment_dictionary",
    "center_columns",
    "closed_form_gstar",
    "csls_retrieve",
    "effective_lambda",
    "evaluate",
    "filter_mask",
    "filter_stats",
    "fipp_loss",
    "gram",
    "inner_product_histogram",
    "iterative_normalize",
    "least_squares_project",
    "load_dictionary",
    "load_embeddings",
    "low_rank_psd_factor",
    "nn_retrieve",
    "orthogonal_deviation",
    "orthonormal_linear_map",
    "pip_distance",
    "preprocess_pair",
    "procrustes",
    "remove_top_components",
    "residual_weights",
    "save_embeddings",
    "sgd_solve",
    "unit_normalize",
    "weighted_procrustes",
]
