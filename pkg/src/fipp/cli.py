"""Command-line interface: align, eval, selflearn, diag, and bench subcommands.

Every run writes a JSON report that echoes its full effective configuration,
so experiment grids can be reassembled from the reports alone.  Reports are
byte-stable for a fixed configuration and seed, apart from timing fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import platform
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, core, diagnostics, retrieval, synthetic
from .core import DivergenceError, FippConfig
from .eigen import ConvergenceError
from .embio import ParseError, load_dictionary, load_embeddings, save_embeddings
from .pipeline import AlignmentOptions, align_embeddings
from .preprocess import PreprocessMode, preprocess_pair
from .selflearn import AugmentationConfig, augment_dictionary, induce_candidates

_PREPROCESS_KINDS = {"none": "none", "isotropic": "isotropic", "iternorm": "iterative_norm"}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConvergenceError, DivergenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ParseError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fipp",
        description="Align two word-embedding spaces through filtered inner-product "
        "projection and evaluate the alignment on lexicon induction.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_align = sub.add_parser("align", help="fit an alignment and write the projected embedding")
    _add_data_flags(p_align, train=True)
    p_align.add_argument("--out-dir", required=True, help="directory for artifacts and the run report")
    p_align.add_argument("--method", choices=("fipp", "procrustes", "linear"), default="fipp")
    _add_preprocess_flags(p_align)
    _add_solver_flags(p_align)
    p_align.add_argument("--rotation", choices=("weighted", "plain", "none"), default="weighted")
    p_align.add_argument("--weight-floor", type=float, default=1e-6)
    p_align.add_argument("--self-learning", type=int, default=0, metavar="N",
                         help="augment the seed with N induced pairs before aligning (0 disables)")
    p_align.set_defaults(func=run_align)

    p_eval = sub.add_parser("eval", help="score an aligned embedding against a test dictionary")
    p_eval.add_argument("--src-emb", required=True, help="aligned source embedding (text format)")
    p_eval.add_argument("--tgt-emb", required=True, help="target embedding (text format)")
    p_eval.add_argument("--test-dict", required=True, help="test dictionary, one 'src tgt' pair per line")
    p_eval.add_argument("--limit", type=int, default=None, help="load at most this many rows per embedding")
    p_eval.add_argument("--out", required=True, help="path for the evaluation report JSON")
    _add_retrieval_flags(p_eval)
    p_eval.set_defaults(func=run_eval)

    p_sl = sub.add_parser("selflearn", help="augment a seed dictionary with induced pairs")
    _add_data_flags(p_sl, train=True)
    p_sl.add_argument("--n-pairs", type=int, default=14000, metavar="N")
    p_sl.add_argument("--out-dict", required=True, help="path for the augmented dictionary TSV")
    p_sl.add_argument("--additions", default=None,
                      help="optional TSV for added pairs with their similarity")
    _add_preprocess_flags(p_sl)
    p_sl.set_defaults(func=run_selflearn)

    p_diag = sub.add_parser("diag", help="write filter, histogram, and spectrum diagnostics")
    _add_data_flags(p_diag, train=True)
    p_diag.add_argument("--out-dir", required=True)
    p_diag.add_argument("--bins", type=int, default=50)
    _add_preprocess_flags(p_diag)
    _add_solver_flags(p_diag)
    p_diag.set_defaults(func=run_diag)

    p_bench = sub.add_parser("bench", help="time the alignment stages on synthetic data")
    p_bench.add_argument("--c", type=int, default=5000, help="seed dictionary size")
    p_bench.add_argument("--d", type=int, default=300, help="target dimension")
    p_bench.add_argument("--d1", type=int, default=None, help="source dimension (defaults to --d)")
    p_bench.add_argument("--n-vocab", type=int, default=50000)
    p_bench.add_argument("--runs", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", required=True, help="path for the timing report JSON")
    p_bench.set_defaults(func=run_bench)
    return parser


def _add_data_flags(parser: argparse.ArgumentParser, train: bool) -> None:
    parser.add_argument("--src-emb", required=True, help="source embedding (text format)")
    parser.add_argument("--tgt-emb", required=True, help="target embedding (text format)")
    if train:
        parser.add_argument("--train-dict", required=True,
                            help="seed dictionary, one 'src tgt' pair per line")
    parser.add_argument("--limit", type=int, default=None,
                        help="load at most this many rows per embedding")


def _add_preprocess_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preprocess", choices=("none", "isotropic", "iternorm"),
                        default="isotropic")
    parser.add_argument("--pca-k", type=int, default=1,
                        help="principal components removed by isotropic preprocessing")
    parser.add_argument("--in-iters", type=int, default=5,
                        help="iterations of iterative normalization")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eps", type=float, default=0.05, help="inner-product filter threshold")
    parser.add_argument("--lambda", dest="lam", type=float, default=1.0,
                        help="transfer-loss weight before gamma scaling")
    parser.add_argument("--no-gamma", action="store_true",
                        help="disable the c^2/nnz rescaling of lambda")
    parser.add_argument("--solver", choices=("eigen", "sgd"), default="eigen")
    parser.add_argument("--sgd-epochs", type=int, default=5000)
    parser.add_argument("--sgd-lr", type=float, default=1e-3)
    parser.add_argument("--seed", type=int, default=0)


def _add_retrieval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--retrieval", choices=("nn", "csls"), default="nn")
    parser.add_argument("--csls-k", type=int, default=10, help="CSLS neighborhood size")
    parser.add_argument("--topk", type=int, default=10, help="ranking depth for scoring")
    parser.add_argument("--exact-map", action="store_true",
                        help="rank the full candidate set instead of the top-k")


def _preprocess_mode(args: argparse.Namespace) -> PreprocessMode:
    return PreprocessMode(
        kind=_PREPROCESS_KINDS[args.preprocess],
        iterations=args.in_iters,
        components_removed=args.pca_k,
    )


def _fipp_config(args: argparse.Namespace) -> FippConfig:
    return FippConfig(
        epsilon=args.eps,
        lam=args.lam,
        gamma_scaling=not args.no_gamma,
        solver=args.solver,
        sgd_epochs=args.sgd_epochs,
        sgd_learning_rate=args.sgd_lr,
        rng_seed=args.seed,
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_align(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    src = load_embeddings(args.src_emb, limit=args.limit)
    tgt = load_embeddings(args.tgt_emb, limit=args.limit)
    seed = load_dictionary(args.train_dict, src, tgt)

    options = AlignmentOptions(
        preprocess=_preprocess_mode(args),
        fipp=_fipp_config(args),
        method=args.method,
        rotation=args.rotation,
        weight_floor=args.weight_floor,
        self_learning=args.self_learning,
    )
    run = align_embeddings(src, tgt, seed, options)

    aligned_path = out_dir / "aligned_src.vec"
    target_path = out_dir / "target_processed.vec"
    save_embeddings(run.aligned_embedding, aligned_path)
    save_embeddings(run.tgt_processed, target_path)

    outputs = {"aligned_embedding": str(aligned_path), "target_embedding": str(target_path)}
    seed_src = run.src_processed.matrix[run.seed.src_indices]
    seed_tgt = run.tgt_processed.matrix[run.seed.tgt_indices]
    spectrum_csv, spectrum_png = diagnostics.write_gram_spectra(
        {"source_seed": seed_src, "target_seed": seed_tgt, "aligned_seed": run.result.seed_aligned},
        out_dir,
    )
    outputs["spectrum"] = str(spectrum_csv)
    outputs["spectrum_figure"] = str(spectrum_png)
    if run.mask is not None:
        hist_csv, hist_png = diagnostics.write_inner_product_histograms(
            run.grams["source"], run.grams["target"], out_dir
        )
        stats_csv, stats_png = diagnostics.write_filter_stats(
            core.filter_stats(run.mask), run.mask, run.seed,
            run.src_processed.vocab, run.tgt_processed.vocab, out_dir,
        )
        outputs.update(
            inner_products=str(hist_csv), inner_products_figure=str(hist_png),
            filter_stats=str(stats_csv), filter_stats_figure=str(stats_png),
        )
    if run.sgd_trace is not None:
        trace_csv, trace_png = diagnostics.write_loss_trace(run.sgd_trace, out_dir)
        outputs.update(loss_trace=str(trace_csv), loss_trace_figure=str(trace_png))

    report = {
        "config": _align_config_echo(args),
        "data": {
            "src_vocab": len(src),
            "tgt_vocab": len(tgt),
            "src_dim": src.dim,
            "tgt_dim": tgt.dim,
            "seed_pairs": len(run.seed),
            "skipped_pairs": run.seed.skipped,
            "self_learning_added": run.self_learning_added,
        },
        "filter": None if run.mask is None else {
            "epsilon": run.mask.epsilon,
            "nnz": run.mask.nnz,
            "size": run.mask.size,
            "density": run.mask.density,
        },
        "lambda_effective": run.lambda_eff,
        "losses": None if run.result.losses is None else run.result.losses.to_dict(),
        "ortho_deviation": run.result.ortho_deviation,
        "projection_condition": run.projection_cond,
        "timing": {name: round(value, 6) for name, value in run.timings.items()},
        "outputs": outputs,
    }
    report_path = out_dir / "run_report.json"
    _write_json(report_path, report)
    print(f"aligned {len(src)} words -> {aligned_path}")
    print(f"report -> {report_path}")
    return 0


def _align_config_echo(args: argparse.Namespace) -> dict:
    return {
        "subcommand": "align",
        "src_emb": str(args.src_emb),
        "tgt_emb": str(args.tgt_emb),
        "train_dict": str(args.train_dict),
        "out_dir": str(args.out_dir),
        "limit": args.limit,
        "method": args.method,
        "preprocess": {
            "kind": _PREPROCESS_KINDS[args.preprocess],
            "pca_k": args.pca_k,
            "in_iters": args.in_iters,
        },
        "fipp": {
            "epsilon": args.eps,
            "lambda": args.lam,
            "gamma_scaling": not args.no_gamma,
            "solver": args.solver,
            "sgd_epochs": args.sgd_epochs,
            "sgd_lr": args.sgd_lr,
        },
        "rotation": args.rotation,
        "weight_floor": args.weight_floor,
        "self_learning": args.self_learning,
        "seed": args.seed,
    }


def run_eval(args: argparse.Namespace) -> int:
    aligned = load_embeddings(args.src_emb, limit=args.limit)
    tgt = load_embeddings(args.tgt_emb, limit=args.limit)
    test = load_dictionary(args.test_dict, aligned, tgt)

    # several translations per source word collapse into one gold set
    gold_by_src: dict[int, set[int]] = {}
    query_order: list[int] = []
    for src_idx, tgt_idx in test.pairs:
        if src_idx not in gold_by_src:
            gold_by_src[src_idx] = set()
            query_order.append(src_idx)
        gold_by_src[src_idx].add(tgt_idx)

    queries = aligned.matrix[query_order]
    topk = len(tgt) if args.exact_map else args.topk
    if args.retrieval == "csls":
        rankings = retrieval.csls_retrieve(queries, tgt.matrix, args.csls_k, topk)
    else:
        rankings = retrieval.nn_retrieve(queries, tgt.matrix, topk)
    gold = {pos: gold_by_src[src_idx] for pos, src_idx in enumerate(query_order)}
    report = retrieval.evaluate(
        rankings, gold, retrieval=args.retrieval,
        csls_k=args.csls_k if args.retrieval == "csls" else None,
    )

    payload = {
        "config": {
            "subcommand": "eval",
            "src_emb": str(args.src_emb),
            "tgt_emb": str(args.tgt_emb),
            "test_dict": str(args.test_dict),
            "limit": args.limit,
            "retrieval": args.retrieval,
            "csls_k": args.csls_k,
            "topk": topk,
            "exact_map": args.exact_map,
        },
        "data": {"test_pairs": len(test), "skipped_pairs": test.skipped,
                 "queries": report.n_queries},
        "report": report.to_dict(),
    }
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _write_json(out_path, payload)
    print(f"queries={report.n_queries} MAP={report.map:.4f} "
          f"P@1={report.p_at_1:.4f} P@5={report.p_at_5:.4f}")
    return 0


def run_selflearn(args: argparse.Namespace) -> int:
    src = load_embeddings(args.src_emb, limit=args.limit)
    tgt = load_embeddings(args.tgt_emb, limit=args.limit)
    seed = load_dictionary(args.train_dict, src, tgt)
    src_p, tgt_p = preprocess_pair(src, tgt, _preprocess_mode(args))

    augmented = augment_dictionary(
        src_p, tgt_p, seed, AugmentationConfig(n_pairs=args.n_pairs)
    )
    out_path = Path(args.out_dict)
    with out_path.open("w", encoding="utf-8") as fh:
        for src_idx, tgt_idx in augmented.pairs:
            fh.write(f"{src.vocab[src_idx]}\t{tgt.vocab[tgt_idx]}\n")

    if args.additions:
        seed_set = set(seed.pairs)
        added = set(augmented.pairs) - seed_set
        candidates = induce_candidates(src_p, tgt_p, seed)
        with Path(args.additions).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter="\t")
            writer.writerow(["src_word", "tgt_word", "similarity"])
            for cand in candidates:
                if (cand.src_index, cand.tgt_index) in added:
                    writer.writerow([
                        src.vocab[cand.src_index], tgt.vocab[cand.tgt_index],
                        f"{cand.similarity:.6f}",
                    ])
    print(f"{len(seed)} seed pairs + {len(augmented) - len(seed)} induced -> {out_path}")
    return 0


def run_diag(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    src = load_embeddings(args.src_emb, limit=args.limit)
    tgt = load_embeddings(args.tgt_emb, limit=args.limit)
    seed = load_dictionary(args.train_dict, src, tgt)

    options = AlignmentOptions(
        preprocess=_preprocess_mode(args), fipp=_fipp_config(args), method="fipp"
    )
    run = align_embeddings(src, tgt, seed, options)
    assert run.mask is not None

    diagnostics.write_inner_product_histograms(
        run.grams["source"], run.grams["target"], out_dir, bins=args.bins
    )
    fractions = core.filter_stats(run.mask)
    diagnostics.write_filter_stats(
        fractions, run.mask, run.seed, run.src_processed.vocab, run.tgt_processed.vocab, out_dir
    )
    seed_src = run.src_processed.matrix[run.seed.src_indices]
    seed_tgt = run.tgt_processed.matrix[run.seed.tgt_indices]
    diagnostics.write_gram_spectra(
        {"source_seed": seed_src, "target_seed": seed_tgt, "aligned_seed": run.result.seed_aligned},
        out_dir,
    )
    if run.sgd_trace is not None:
        diagnostics.write_loss_trace(run.sgd_trace, out_dir)

    order = np.argsort(fractions, kind="stable")
    def pair_words(idx: int) -> list[str]:
        si, ti = run.seed.pairs[idx]
        return [run.src_processed.vocab[si], run.tgt_processed.vocab[ti], float(fractions[idx])]

    summary = {
        "config": {
            "subcommand": "diag",
            "src_emb": str(args.src_emb),
            "tgt_emb": str(args.tgt_emb),
            "train_dict": str(args.train_dict),
            "preprocess": _PREPROCESS_KINDS[args.preprocess],
            "epsilon": args.eps,
            "lambda": args.lam,
            "gamma_scaling": not args.no_gamma,
            "solver": args.solver,
            "seed": args.seed,
        },
        "filter": {
            "nnz": run.mask.nnz,
            "size": run.mask.size,
            "density": run.mask.density,
            "mean_fraction_filtered": float(fractions.mean()),
        },
        "least_filtered": [pair_words(int(i)) for i in order[:5]],
        "most_filtered": [pair_words(int(i)) for i in order[::-1][:5]],
        "lambda_effective": run.lambda_eff,
        "losses": None if run.result.losses is None else run.result.losses.to_dict(),
        "ortho_deviation": run.result.ortho_deviation,
    }
    _write_json(out_dir / "diag_summary.json", summary)
    print(f"diagnostics -> {out_dir}")
    return 0


def run_bench(args: argparse.Namespace) -> int:
    d1 = args.d1 if args.d1 is not None else args.d
    if args.runs < 1:
        raise ValueError("--runs must be >= 1")
    stage_samples: dict[str, list[float]] = {}
    totals: list[float] = []
    for run_index in range(args.runs):
        src, tgt = synthetic.rotated_pair(
            n=args.n_vocab, d1=d1, d2=args.d, noise=0.02, seed=args.seed + run_index
        )
        seed = synthetic.identity_dictionary(np.arange(args.c))
        started = time.perf_counter()
        run = align_embeddings(src, tgt, seed, AlignmentOptions())
        totals.append(time.perf_counter() - started)
        for stage, seconds in run.timings.items():
            stage_samples.setdefault(stage, []).append(seconds)

    stages = {
        stage: {
            "mean": statistics.mean(samples),
            "stdev": statistics.stdev(samples) if len(samples) > 1 else 0.0,
            "runs": samples,
        }
        for stage, samples in stage_samples.items()
    }
    payload = {
        "config": {
            "subcommand": "bench",
            "c": args.c,
            "d": args.d,
            "d1": d1,
            "n_vocab": args.n_vocab,
            "runs": args.runs,
            "seed": args.seed,
        },
        "machine": {
            "platform": platform.platform(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "cpus": os.cpu_count(),
        },
        "stages": stages,
        "total": {
            "mean": statistics.mean(totals),
            "stdev": statistics.stdev(totals) if len(totals) > 1 else 0.0,
            "runs": totals,
        },
    }
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _write_json(out_path, payload)
    for stage, entry in stages.items():
        print(f"{stage:>12}: {entry['mean']:8.3f} s  (+/- {entry['stdev']:.3f})")
    print(f"{'total':>12}: {payload['total']['mean']:8.3f} s over {args.runs} run(s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
