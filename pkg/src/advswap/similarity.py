"""Sentence-level semantic similarity behind a pluggable encoder.

The built-in encoder averages word vectors of content tokens; a real
sentence encoder can be attached over HTTP via `RemoteEncoder`. Scores
are cosines of the (normalized) encodings, so absolute values depend on
the encoder; campaigns record which encoder produced them.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
import requests

from .embeddings import EmbeddingStore
from .errors import EncodingError, TransportError
from .text import Document, detokenize


@dataclass(frozen=True)
class SimilarityScore:
    value: float
    degenerate: bool = False


class SentenceEncoder(ABC):
    """Maps a document's mutable field to a fixed-dimension vector.

    Encoding must be deterministic within one process.
    """

    name: str = "encoder"

    @abstractmethod
    def encode(self, doc: Document) -> np.ndarray:
        raise NotImplementedError


def encode_average(doc: Document, store: EmbeddingStore) -> np.ndarray:
    """Unit-normalized mean vector of in-vocabulary, non-stop tokens.

    Falls back to all in-vocabulary tokens when every known token is a
    stop word. Raises EncodingError when nothing can be embedded or the
    mean cancels to zero.
    """
    known = [t for t in doc.tokens if t.normalized in store]
    content = [t for t in known if not t.is_stop]
    chosen = content or known
    if not chosen:
        raise EncodingError("no token of the document is in the vocabulary")
    mean = np.mean([store.vector(t.normalized) for t in chosen], axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise EncodingError("token vectors cancel to a zero encoding")
    return mean / norm


class AverageEmbeddingEncoder(SentenceEncoder):
    """Desk-scale default encoder: average of word vectors."""

    name = "average_embedding"

    def __init__(self, store: EmbeddingStore):
        self._store = store

    def encode(self, doc: Document) -> np.ndarray:
        return encode_average(doc, self._store)


def sentence_similarity(
    a: Document, b: Document, encoder: SentenceEncoder
) -> SimilarityScore:
    """Cosine similarity of two document encodings.

    Symmetric; identical encodings score exactly 1. If either document
    cannot be encoded the score is 0 and flagged degenerate.
    """
    try:
        ea = encoder.encode(a)
        eb = encoder.encode(b)
    except EncodingError:
        return SimilarityScore(0.0, degenerate=True)
    if ea.shape != eb.shape:
        raise ValueError("encoder produced mismatched dimensions")
    if np.array_equal(ea, eb):
        return SimilarityScore(1.0)
    na = float(np.linalg.norm(ea))
    nb = float(np.linalg.norm(eb))
    if na == 0.0 or nb == 0.0:
        return SimilarityScore(0.0, degenerate=True)
    value = float(np.dot(ea / na, eb / nb))
    return SimilarityScore(max(-1.0, min(1.0, value)))


def remote_encode(
    texts: list[str],
    endpoint: str,
    timeout: float = 10.0,
    session: requests.Session | None = None,
) -> list[np.ndarray]:
    """POST {"texts": [...]} to `endpoint`, expect {"vectors": [[...], ...]}.

    Returns one vector per input text. Any network failure, non-200
    status, malformed payload, or dimension mismatch raises
    TransportError; nothing is silently dropped.
    """
    if not texts:
        return []
    post = session.post if session is not None else requests.post
    try:
        response = post(endpoint, json={"texts": texts}, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"encoder request to {endpoint} failed: {exc}") from exc
    if response.status_code != 200:
        raise TransportError(
            f"encoder at {endpoint} returned status {response.status_code}"
        )
    try:
        payload = response.json()
        vectors = payload["vectors"]
    except (ValueError, KeyError, TypeError) as exc:
        raise TransportError(f"malformed encoder response: {exc}") from exc
    if not isinstance(vectors, list) or len(vectors) != len(texts):
        raise TransportError(
            f"expected {len(texts)} vectors, got "
            f"{len(vectors) if isinstance(vectors, list) else type(vectors).__name__}"
        )
    out: list[np.ndarray] = []
    dimension: int | None = None
    for row in vectors:
        try:
            vec = np.asarray(row, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise TransportError(f"non-numeric vector in response: {exc}") from exc
        if vec.ndim != 1:
            raise TransportError("vectors must be flat numeric lists")
        if dimension is None:
            dimension = len(vec)
        elif len(vec) != dimension:
            raise TransportError("vectors in one batch differ in dimension")
        out.append(vec)
    return out


class RemoteEncoder(SentenceEncoder):
    """SentenceEncoder speaking the JSON protocol of `remote_encode`.

    Responses are cached per detokenized text, which both guarantees
    within-process determinism and avoids re-encoding the unchanged
    reference document on every comparison.
    """

    name = "remote"

    def __init__(self, endpoint: str, timeout: float = 10.0):
        self._endpoint = endpoint
        self._timeout = timeout
        self._session = requests.Session()
        self._cache: dict[str, np.ndarray] = {}

    def encode(self, doc: Document) -> np.ndarray:
        text = detokenize(doc)
        hit = self._cache.get(text)
        if hit is None:
            hit = remote_encode(
                [text], self._endpoint, timeout=self._timeout, session=self._session
            )[0]
            self._cache[text] = hit
        return hit
