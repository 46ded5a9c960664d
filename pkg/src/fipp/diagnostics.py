"""Diagnostic artifacts for alignment runs: CSV tables plus rendered figures.

Every CSV has a PNG counterpart written next to it so runs can be inspected
without re-loading the data.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import FilterMask, inner_product_histogram
from .embio import SeedDictionary


def write_inner_product_histograms(
    gs: np.ndarray,
    gt: np.ndarray,
    out_dir: str | Path,
    bins: int = 50,
    stem: str = "inner_products",
) -> tuple[Path, Path]:
    """Histogram the off-diagonal entries of both Gram matrices (CSV + PNG)."""
    out_dir = Path(out_dir)
    src_counts, src_edges = inner_product_histogram(gs, bins)
    tgt_counts, tgt_edges = inner_product_histogram(gt, bins)

    csv_path = out_dir / f"{stem}.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["side", "bin_start", "bin_end", "count"])
        for counts, edges, side in ((src_counts, src_edges, "source"), (tgt_counts, tgt_edges, "target")):
            for start, end, count in zip(edges[:-1], edges[1:], counts):
                writer.writerow([side, f"{start:.6g}", f"{end:.6g}", int(count)])

    png_path = out_dir / f"{stem}.png"
    fig, ax = plt.subplots(figsize=(7, 4))
    centers_s = (src_edges[:-1] + src_edges[1:]) / 2
    centers_t = (tgt_edges[:-1] + tgt_edges[1:]) / 2
    ax.plot(centers_s, src_counts, drawstyle="steps-mid", label="source")
    ax.plot(centers_t, tgt_counts, drawstyle="steps-mid", label="target")
    ax.set_xlabel("inner product")
    ax.set_ylabel("count")
    ax.set_title("Off-diagonal inner products of the seed Gram matrices")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return csv_path, png_path


def write_filter_stats(
    fractions: np.ndarray,
    mask: FilterMask,
    seed: SeedDictionary,
    src_vocab: list[str],
    tgt_vocab: list[str],
    out_dir: str | Path,
    stem: str = "filter_stats",
) -> tuple[Path, Path]:
    """Per-pair filtered fractions with their word pair (CSV + PNG histogram)."""
    out_dir = Path(out_dir)
    csv_path = out_dir / f"{stem}.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_index", "src_word", "tgt_word", "fraction_filtered"])
        for idx, ((si, ti), frac) in enumerate(zip(seed.pairs, fractions)):
            writer.writerow([idx, src_vocab[si], tgt_vocab[ti], f"{frac:.6f}"])

    png_path = out_dir / f"{stem}.png"
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist(fractions, bins=min(40, max(5, len(fractions) // 5)), color="steelblue", edgecolor="white")
    ax.set_xlabel("fraction of filtered entries per pair")
    ax.set_ylabel("pairs")
    ax.set_title(f"Filter density (epsilon={mask.epsilon:g}, kept {mask.density:.1%})")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return csv_path, png_path


def write_loss_trace(
    trace: np.ndarray, out_dir: str | Path, stem: str = "loss_trace"
) -> tuple[Path, Path]:
    """Per-epoch objective values from the gradient-descent solver (CSV + PNG)."""
    out_dir = Path(out_dir)
    csv_path = out_dir / f"{stem}.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss"])
        for epoch, value in enumerate(trace):
            writer.writerow([epoch, f"{value:.12g}"])

    png_path = out_dir / f"{stem}.png"
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(np.arange(len(trace)), trace)
    ax.set_xlabel("epoch")
    ax.set_ylabel("objective")
    ax.set_yscale("log")
    ax.set_title("Gradient-descent loss trace")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return csv_path, png_path


def write_gram_spectra(
    matrices: dict[str, np.ndarray],
    out_dir: str | Path,
    stem: str = "spectrum",
) -> tuple[Path, Path]:
    """Descending squared-singular-value spectra of several matrices (CSV + PNG).

    Each entry maps a label to a (rows x dim) matrix; its Gram spectrum is the
    squared singular values, padded implicitly by zeros beyond the rank.
    """
    out_dir = Path(out_dir)
    spectra = {
        label: np.linalg.svd(matrix, compute_uv=False) ** 2 for label, matrix in matrices.items()
    }

    csv_path = out_dir / f"{stem}.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "index", "eigenvalue"])
        for label, values in spectra.items():
            for idx, value in enumerate(values):
                writer.writerow([label, idx, f"{value:.12g}"])

    png_path = out_dir / f"{stem}.png"
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, values in spectra.items():
        ax.plot(np.arange(1, len(values) + 1), values, marker=".", label=label)
    ax.set_xlabel("component")
    ax.set_ylabel("Gram eigenvalue")
    ax.set_yscale("log")
    ax.set_title("Gram spectra of seed matrices")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return csv_path, png_path
