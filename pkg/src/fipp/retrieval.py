"""Translation retrieval by cosine nearest neighbors or CSLS, scored with MAP.

All rankings are deterministic: score ties break toward the lower candidate
index.  CSLS penalizes each cosine score by the mean similarity of both the
query and the candidate to their respective nearest neighborhoods, which
corrects for hub vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EvalReport:
    """Per-query best gold ranks plus aggregate MAP and precision-at-k."""

    per_query: list[tuple[int, int | None]]
    map: float
    p_at_1: float
    p_at_5: float
    n_queries: int
    retrieval: str = "nn"
    csls_k: int | None = None

    def to_dict(self) -> dict:
        return {
            "per_query": [[q, r] for q, r in self.per_query],
            "map": self.map,
            "p_at_1": self.p_at_1,
            "p_at_5": self.p_at_5,
            "n_queries": self.n_queries,
            "retrieval": self.retrieval,
            "csls_k": self.csls_k,
        }


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / np.where(norms == 0, 1.0, norms)


def _rank_descending(scores: np.ndarray, k: int) -> np.ndarray:
    # stable sort on negated scores keeps lower candidate indices first on ties
    order = np.argsort(-scores, axis=1, kind="stable")
    return order[:, :k]


def nn_retrieve(queries: np.ndarray, candidates: np.ndarray, k: int) -> np.ndarray:
    """Top-k candidate indices per query by descending cosine similarity."""
    if queries.shape[1] != candidates.shape[1]:
        raise ValueError(
            f"dimension mismatch: queries {queries.shape[1]}, candidates {candidates.shape[1]}"
        )
    if candidates.shape[0] == 0:
        raise ValueError("empty candidate set")
    k = min(k, candidates.shape[0])
    sims = _unit_rows(queries) @ _unit_rows(candidates).T
    return _rank_descending(sims, k)


def csls_retrieve(
    queries: np.ndarray, candidates: np.ndarray, neighborhood: int, topk: int
) -> np.ndarray:
    """Top-k candidates per query under cross-domain similarity local scaling.

    score(x, y) = 2 cos(x, y) - r_C(x) - r_Q(y), where r_C(x) is the mean
    cosine of x to its ``neighborhood`` nearest candidates and r_Q(y) the mean
    cosine of y to its ``neighborhood`` nearest queries.
    """
    if queries.shape[1] != candidates.shape[1]:
        raise ValueError(
            f"dimension mismatch: queries {queries.shape[1]}, candidates {candidates.shape[1]}"
        )
    n_queries, n_candidates = queries.shape[0], candidates.shape[0]
    if n_candidates == 0:
        raise ValueError("empty candidate set")
    if not 1 <= neighborhood <= min(n_candidates, n_queries):
        raise ValueError(
            f"neighborhood must be in [1, {min(n_candidates, n_queries)}], got {neighborhood}"
        )
    sims = _unit_rows(queries) @ _unit_rows(candidates).T
    top_for_query = -np.partition(-sims, neighborhood - 1, axis=1)[:, :neighborhood]
    r_query = top_for_query.mean(axis=1)
    top_for_candidate = -np.partition(-sims.T, neighborhood - 1, axis=1)[:, :neighborhood]
    r_candidate = top_for_candidate.mean(axis=1)
    scores = 2.0 * sims - r_query[:, None] - r_candidate[None, :]
    return _rank_descending(scores, min(topk, n_candidates))


def evaluate(
    rankings: np.ndarray,
    gold: dict[int, set[int]],
    retrieval: str = "nn",
    csls_k: int | None = None,
) -> EvalReport:
    """Score ranked lists against gold translation sets.

    MAP is the mean reciprocal rank of each query's best gold candidate (zero
    when no gold appears in the list); p_at_j is the fraction of queries whose
    best gold rank is at most j.
    """
    per_query: list[tuple[int, int | None]] = []
    reciprocal = []
    for query_index, row in enumerate(np.asarray(rankings)):
        if query_index not in gold:
            raise KeyError(f"query {query_index} missing from the gold map")
        gold_set = gold[query_index]
        best: int | None = None
        for position, candidate in enumerate(row, start=1):
            if int(candidate) in gold_set:
                best = position
                break
        per_query.append((query_index, best))
        reciprocal.append(0.0 if best is None else 1.0 / best)
    n_queries = len(per_query)
    ranks = [r for _, r in per_query]
    return EvalReport(
        per_query=per_query,
        map=float(np.mean(reciprocal)) if reciprocal else 0.0,
        p_at_1=sum(1 for r in ranks if r is not None and r <= 1) / max(n_queries, 1),
        p_at_5=sum(1 for r in ranks if r is not None and r <= 5) / max(n_queries, 1),
        n_queries=n_queries,
        retrieval=retrieval,
        csls_k=csls_k,
    )
