"""Read and write embeddings and seed dictionaries in plain-text formats.

Embedding files follow the word2vec text convention: a header line ``n d``
followed by one ``token v1 ... vd`` line per word.  Dictionary files hold one
``src_word<TAB or space>tgt_word`` pair per line.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ParseError(ValueError):
    """Malformed embedding or dictionary file; message names the path and line."""


@dataclass(frozen=True)
class Embedding:
    """An ordered vocabulary plus its n x d matrix of row vectors."""

    vocab: list[str]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2:
            raise ValueError(f"embedding matrix must be 2-D, got shape {self.matrix.shape}")
        if len(self.vocab) != self.matrix.shape[0]:
            raise ValueError(
                f"vocab length {len(self.vocab)} does not match matrix rows {self.matrix.shape[0]}"
            )

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.vocab)

    def token_index(self) -> dict[str, int]:
        """Map each token to its row index."""
        return {w: i for i, w in enumerate(self.vocab)}


@dataclass(frozen=True)
class SeedDictionary:
    """Resolved ``(src_index, tgt_index)`` pairs linking two vocabularies."""

    pairs: list[tuple[int, int]]
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def src_indices(self) -> np.ndarray:
        return np.array([p[0] for p in self.pairs], dtype=int)

    @property
    def tgt_indices(self) -> np.ndarray:
        return np.array([p[1] for p in self.pairs], dtype=int)


def load_embeddings(path: str | Path, limit: int | None = None) -> Embedding:
    """Load a text embedding file, keeping at most ``limit`` rows.

    Raises :class:`ParseError` with the offending line number for a malformed
    header, a row with the wrong number of values, a non-finite value, or a
    duplicate token.
    """
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:1: expected header 'n d', got {header.strip()!r}")
        try:
            n, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"{path}:1: non-integer header fields {header.strip()!r}") from None
        if n < 1 or d < 1:
            raise ParseError(f"{path}:1: header must declare at least one row and one dimension")

        rows = n if limit is None else min(n, limit)
        vocab: list[str] = []
        seen: set[str] = set()
        matrix = np.empty((rows, d), dtype=float)
        for i in range(rows):
            lineno = i + 2
            line = fh.readline()
            if not line:
                raise ParseError(f"{path}:{lineno}: file ends after {i} of {rows} vector rows")
            token, _, rest = line.rstrip("\n").partition(" ")
            values = rest.split()
            if not token or len(values) != d:
                raise ParseError(
                    f"{path}:{lineno}: expected token plus {d} values, got {len(values)} values"
                )
            try:
                row = np.array([float(v) for v in values], dtype=float)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric value in vector for {token!r}") from None
            if not np.all(np.isfinite(row)):
                raise ParseError(f"{path}:{lineno}: non-finite value in vector for {token!r}")
            if token in seen:
                raise ParseError(f"{path}:{lineno}: duplicate token {token!r}")
            seen.add(token)
            vocab.append(token)
            matrix[i] = row
    return Embedding(vocab, matrix)


def save_embeddings(emb: Embedding, path: str | Path) -> None:
    """Write ``emb`` in the same text format :func:`load_embeddings` reads.

    Values are printed with 12 significant digits so that a round trip
    reproduces each entry to well below 1e-9 relative error.
    """
    if len(emb) == 0:
        raise ValueError(f"refusing to write empty embedding to {path}")
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8") as fh:
            fh.write(f"{len(emb)} {emb.dim}\n")
            for token, row in zip(emb.vocab, emb.matrix):
                fh.write(token + " " + " ".join(f"{v:.12g}" for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"could not write embedding to {path}: {exc}") from exc


def load_dictionary(path: str | Path, src: Embedding, tgt: Embedding) -> SeedDictionary:
    """Resolve a word-pair file against two vocabularies.

    Pairs with an out-of-vocabulary word on either side are skipped (the count
    is kept on the returned dictionary); duplicate pairs collapse to the first
    occurrence.  Raises if no pair resolves.
    """
    path = Path(path)
    src_index = src.token_index()
    tgt_index = tgt.token_index()
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    skipped = 0
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise OSError(f"could not read dictionary {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'src tgt', got {len(fields)} fields")
        src_word, tgt_word = fields[0].strip(), fields[1].strip()
        if src_word not in src_index or tgt_word not in tgt_index:
            skipped += 1
            continue
        pair = (src_index[src_word], tgt_index[tgt_word])
        if pair in seen:
            continue
        seen.add(pair)
        pairs.append(pair)
    if not pairs:
        raise ValueError(f"{path}: no dictionary pair resolves against both vocabularies")
    return SeedDictionary(pairs, skipped)
