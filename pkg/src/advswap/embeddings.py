"""Word-vector store with exact cosine nearest-neighbor synonym queries.

Vectors are unit-normalized at load time, so every similarity is a plain
dot product. Synonym lookups are exact full scans over the vocabulary;
results are cached per (word, n, delta) within a store's lifetime.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import FormatError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynonymCandidate:
    word: str
    word_similarity: float


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two vectors; symmetric, in [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    return float(np.dot(u / nu, v / nv))


class EmbeddingStore:
    """Immutable vocabulary of unit-normalized word vectors."""

    def __init__(self, words: Sequence[str], matrix: np.ndarray):
        if len(words) != matrix.shape[0]:
            raise ValueError("word list and matrix row count differ")
        self._words: tuple[str, ...] = tuple(words)
        self._matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        self._row: dict[str, int] = {w: i for i, w in enumerate(self._words)}
        self._cache: dict[tuple[str, int, float], list[SynonymCandidate]] = {}
        self._cache_lock = threading.Lock()

    @classmethod
    def from_dict(cls, vectors: Mapping[str, Sequence[float]]) -> "EmbeddingStore":
        """Build a store from raw (not necessarily normalized) vectors."""
        words = list(vectors)
        matrix = np.array([vectors[w] for w in words], dtype=np.float64)
        norms = np.linalg.norm(matrix, axis=1, keepdims=True)
        if np.any(norms == 0.0):
            raise ValueError("zero vector in input")
        return cls(words, matrix / norms)

    @property
    def dimension(self) -> int:
        return int(self._matrix.shape[1]) if len(self._words) else 0

    @property
    def words(self) -> tuple[str, ...]:
        return self._words

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word: str) -> bool:
        return word in self._row

    def vector(self, word: str) -> np.ndarray:
        return self._matrix[self._row[word]]

    def nearest_synonyms(self, word: str, n: int, delta: float) -> list[SynonymCandidate]:
        """Top `n` vocabulary words with cosine similarity >= `delta`.

        The query word itself is excluded; ordering is by descending
        similarity, ties broken by ascending word. Out-of-vocabulary
        queries yield an empty list. Exact: equivalent to a full scan.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        key = (word, n, delta)
        with self._cache_lock:
            hit = self._cache.get(key)
        if hit is not None:
            return list(hit)
        result = self._scan(word, n, delta)
        with self._cache_lock:
            self._cache.setdefault(key, result)
        return list(result)

    def _scan(self, word: str, n: int, delta: float) -> list[SynonymCandidate]:
        row = self._row.get(word)
        if row is None:
            return []
        sims = self._matrix @ self._matrix[row]
        keep = np.flatnonzero(sims >= delta)
        scored = [
            (float(sims[i]), self._words[i]) for i in keep if self._words[i] != word
        ]
        scored.sort(key=lambda pair: (-pair[0], pair[1]))
        return [SynonymCandidate(w, s) for s, w in scored[:n]]


def load_embeddings(path: str) -> EmbeddingStore:
    """Parse a text embedding file: one "word v1 v2 ... vd" line per word.

    An optional first line of two integers ("count dim") is skipped.
    Vectors are unit-normalized; duplicate words keep their first
    occurrence; zero or non-finite vectors are skipped with a warning.
    Inconsistent dimensions raise a FormatError naming the line.
    """
    words: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dimension: int | None = None
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot open embeddings: {exc}", path=path) from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            fields = line.split()
            if not fields:
                continue
            if lineno == 1 and len(fields) == 2 and _both_ints(fields):
                continue
            word, values = fields[0], fields[1:]
            if not values:
                raise FormatError("line has no vector values", path=path, line=lineno)
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise FormatError(f"bad number: {exc}", path=path, line=lineno) from exc
            if dimension is None:
                dimension = len(vec)
            elif len(vec) != dimension:
                raise FormatError(
                    f"expected {dimension} values, found {len(vec)}",
                    path=path,
                    line=lineno,
                )
            if word in seen:
                continue
            norm = float(np.linalg.norm(vec))
            if norm == 0.0 or not np.isfinite(norm):
                log.warning("%s:%d: skipping degenerate vector for %r", path, lineno, word)
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec / norm)
    if dimension is None:
        raise FormatError("no embedding data found", path=path)
    matrix = np.vstack(rows) if rows else np.empty((0, dimension))
    return EmbeddingStore(words, matrix)


def _both_ints(fields: list[str]) -> bool:
    try:
        int(fields[0])
        int(fields[1])
    except ValueError:
        return False
    return True


def nearest_synonyms(
    word: str, store: EmbeddingStore, n: int, delta: float
) -> list[SynonymCandidate]:
    """Functional form of `EmbeddingStore.nearest_synonyms`."""
    return store.nearest_synonyms(word, n, delta)
