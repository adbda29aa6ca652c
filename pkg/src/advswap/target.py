"""The black-box model boundary.

A target model exposes only `labels` and `predict_batch`; the attack
never sees weights or gradients. Two implementations ship here: a
trainable multinomial bag-of-words classifier (desk-scale stand-in for
neural targets, with closed-form behavior tests can verify) and an HTTP
client for any remote scorer speaking the JSON protocol below.

Query accounting is done by wrapping a model in `CountingModel`; one
wrapper per attack run, counts merged at campaign level. The counter
tracks scored texts, not HTTP round-trips, so batching and retries never
distort the number.
"""

from __future__ import annotations

import json
import math
import threading
import time
from abc import ABC, abstractmethod
from collections import Counter
from typing import Iterable, Sequence

import numpy as np
import requests

from .errors import ContractError, FormatError, TrainingError, TransportError
from .text import Document, detokenize, tokenize

PAIR_SEPARATOR = "|||"

PERSIST_FORMAT = "advswap-bow"
PERSIST_VERSION = 1


class LabelDistribution:
    """Probability vector over the label ids of a model."""

    __slots__ = ("probs",)

    def __init__(self, probs: Sequence[float] | np.ndarray):
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or len(arr) < 2:
            raise ValueError("a label distribution needs at least 2 labels")
        if not math.isclose(float(arr.sum()), 1.0, abs_tol=1e-6):
            raise ValueError(f"probabilities sum to {arr.sum()}, expected 1")
        self.probs = arr

    @property
    def top_index(self) -> int:
        return int(np.argmax(self.probs))

    def __getitem__(self, index: int) -> float:
        return float(self.probs[index])

    def __len__(self) -> int:
        return len(self.probs)


class TargetModel(ABC):
    """Interface of a queryable classifier: label names plus batched scoring."""

    @property
    @abstractmethod
    def labels(self) -> tuple[str, ...]:
        raise NotImplementedError

    @abstractmethod
    def predict_batch(self, texts: Sequence[str]) -> list[LabelDistribution]:
        raise NotImplementedError

    def predict(self, text: str) -> LabelDistribution:
        return self.predict_batch([text])[0]


class QueryCounter:
    """Thread-safe count of texts scored by a model."""

    def __init__(self) -> None:
        self._count = 0
        self._lock = threading.Lock()

    def add(self, n: int) -> None:
        with self._lock:
            self._count += n

    @property
    def count(self) -> int:
        return self._count


class CountingModel(TargetModel):
    """Proxy advancing a query counter by the size of every batch.

    Also logs per-call batch sizes so tests can audit the accounting.
    """

    def __init__(self, inner: TargetModel, counter: QueryCounter | None = None):
        self._inner = inner
        self.counter = counter if counter is not None else QueryCounter()
        self.calls: list[int] = []

    @property
    def labels(self) -> tuple[str, ...]:
        return self._inner.labels

    def predict_batch(self, texts: Sequence[str]) -> list[LabelDistribution]:
        result = self._inner.predict_batch(texts)
        self.counter.add(len(texts))
        self.calls.append(len(texts))
        return result


class BowClassifier(TargetModel):
    """Multinomial bag-of-words classifier with additive smoothing.

    Counts the lowercased non-punctuation tokens of each text. Unknown
    tokens contribute nothing, so an all-unknown text scores exactly the
    class priors.
    """

    def __init__(
        self,
        labels: Sequence[str],
        vocabulary: Sequence[str],
        counts: np.ndarray,
        doc_counts: Sequence[int],
        alpha: float = 1.0,
    ):
        if len(labels) < 2:
            raise TrainingError("need at least 2 labels")
        self._labels = tuple(labels)
        self._vocabulary = tuple(vocabulary)
        self._index = {w: i for i, w in enumerate(self._vocabulary)}
        self._counts = np.asarray(counts, dtype=np.float64)
        self._doc_counts = tuple(int(c) for c in doc_counts)
        self._alpha = float(alpha)
        totals = self._counts.sum(axis=1, keepdims=True)
        vocab_size = max(len(self._vocabulary), 1)
        self._log_likelihood = np.log(
            (self._counts + self._alpha) / (totals + self._alpha * vocab_size)
        )
        self._log_prior = np.log(
            np.asarray(self._doc_counts, dtype=np.float64) / sum(self._doc_counts)
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def alpha(self) -> float:
        return self._alpha

    def predict_batch(self, texts: Sequence[str]) -> list[LabelDistribution]:
        return [self._score(text) for text in texts]

    def _score(self, text: str) -> LabelDistribution:
        scores = self._log_prior.copy()
        for word, count in Counter(self._tokens(text)).items():
            column = self._index.get(word)
            if column is not None:
                scores += count * self._log_likelihood[:, column]
        shifted = np.exp(scores - scores.max())
        return LabelDistribution(shifted / shifted.sum())

    @staticmethod
    def _tokens(text: str) -> list[str]:
        return [t.normalized for t in tokenize(text).tokens if not t.is_punct]

    def save(self, path: str) -> None:
        payload = {
            "format": PERSIST_FORMAT,
            "version": PERSIST_VERSION,
            "labels": list(self._labels),
            "alpha": self._alpha,
            "doc_counts": list(self._doc_counts),
            "vocabulary": list(self._vocabulary),
            "counts": self._counts.astype(int).tolist(),
        }
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle)
            handle.write("\n")

    @classmethod
    def load(cls, path: str) -> "BowClassifier":
        try:
            with open(path, encoding="utf-8") as handle:
                payload = json.load(handle)
        except OSError as exc:
            raise FormatError(f"cannot read model: {exc}", path=path) from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"model file is not JSON: {exc}", path=path) from exc
        if payload.get("format") != PERSIST_FORMAT:
            raise FormatError("not a bag-of-words model file", path=path)
        if payload.get("version") != PERSIST_VERSION:
            raise FormatError(
                f"unsupported model version {payload.get('version')}", path=path
            )
        return cls(
            labels=payload["labels"],
            vocabulary=payload["vocabulary"],
            counts=np.asarray(payload["counts"], dtype=np.float64),
            doc_counts=payload["doc_counts"],
            alpha=payload["alpha"],
        )


def train_bow_classifier(
    pairs: Iterable[tuple[str, str]], alpha: float = 1.0
) -> BowClassifier:
    """Train the built-in classifier from (text, label) pairs.

    Labels are ordered alphabetically for determinism. Raises
    TrainingError when fewer than two distinct labels are present.
    """
    if alpha <= 0:
        raise TrainingError("smoothing constant must be positive")
    by_label: dict[str, Counter] = {}
    doc_counts: Counter = Counter()
    for text, label in pairs:
        by_label.setdefault(label, Counter()).update(BowClassifier._tokens(text))
        doc_counts[label] += 1
    if len(by_label) < 2:
        raise TrainingError(
            f"corpus has {len(by_label)} label(s); at least 2 are required"
        )
    labels = tuple(sorted(by_label))
    vocabulary = tuple(sorted(set().union(*by_label.values())))
    index = {w: i for i, w in enumerate(vocabulary)}
    counts = np.zeros((len(labels), len(vocabulary)), dtype=np.float64)
    for row, label in enumerate(labels):
        for word, count in by_label[label].items():
            counts[row, index[word]] = count
    return BowClassifier(
        labels=labels,
        vocabulary=vocabulary,
        counts=counts,
        doc_counts=[doc_counts[label] for label in labels],
        alpha=alpha,
    )


class RemoteScorer(TargetModel):
    """HTTP client for a remote scorer.

    Protocol: POST {"texts": [...]} to the endpoint; the response is
    {"labels": [...], "probabilities": [[...], ...]} with one row per
    text. The labels field may be omitted once known. Transient failures
    (connection errors, 5xx) are retried with bounded exponential
    backoff; retries never re-count texts because counting happens in
    `CountingModel`, per logical batch.
    """

    def __init__(
        self,
        endpoint: str,
        labels: Sequence[str] | None = None,
        max_attempts: int = 3,
        backoff: float = 0.25,
        timeout: float = 10.0,
    ):
        if max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        self._endpoint = endpoint
        self._labels: tuple[str, ...] | None = tuple(labels) if labels else None
        self._max_attempts = max_attempts
        self._backoff = backoff
        self._timeout = timeout
        self._session = requests.Session()

    @property
    def labels(self) -> tuple[str, ...]:
        if self._labels is None:
            raise ContractError(
                "label set unknown: configure labels or issue a first query"
            )
        return self._labels

    def predict_batch(self, texts: Sequence[str]) -> list[LabelDistribution]:
        payload = self._request({"texts": list(texts)})
        return self._parse(payload, expected=len(texts))

    def _request(self, body: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(self._max_attempts):
            if attempt:
                time.sleep(self._backoff * (2 ** (attempt - 1)))
            try:
                response = self._session.post(
                    self._endpoint, json=body, timeout=self._timeout
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 500 <= response.status_code < 600:
                last_error = TransportError(
                    f"scorer returned status {response.status_code}"
                )
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"scorer at {self._endpoint} returned status {response.status_code}"
                )
            try:
                return response.json()
            except ValueError as exc:
                raise TransportError(f"scorer response is not JSON: {exc}") from exc
        raise TransportError(
            f"scorer at {self._endpoint} unreachable after "
            f"{self._max_attempts} attempts: {last_error}"
        )

    def _parse(self, payload: dict, expected: int) -> list[LabelDistribution]:
        advertised = payload.get("labels")
        if advertised is not None:
            advertised = tuple(advertised)
            if self._labels is None:
                if len(advertised) < 2:
                    raise ContractError("scorer advertised fewer than 2 labels")
                self._labels = advertised
            elif advertised != self._labels:
                raise ContractError(
                    f"label set changed: {advertised} vs {self._labels}"
                )
        if self._labels is None:
            raise ContractError("first scorer response did not advertise labels")
        rows = payload.get("probabilities")
        if not isinstance(rows, list) or len(rows) != expected:
            raise ContractError(
                f"expected {expected} probability rows, got "
                f"{len(rows) if isinstance(rows, list) else type(rows).__name__}"
            )
        out: list[LabelDistribution] = []
        for row in rows:
            if not isinstance(row, list) or len(row) != len(self._labels):
                raise ContractError("probability row length does not match labels")
            try:
                out.append(LabelDistribution(row))
            except ValueError as exc:
                raise ContractError(str(exc)) from exc
        return out


def remote_scorer(
    endpoint: str, labels: Sequence[str] | None = None, **kwargs
) -> RemoteScorer:
    """Functional constructor for `RemoteScorer`."""
    return RemoteScorer(endpoint, labels=labels, **kwargs)


def _escape_pair_field(field: str) -> str:
    return field.replace("\\", "\\\\").replace("|", "\\|")


def _unescape_pair_field(field: str) -> str:
    out: list[str] = []
    chars = iter(field)
    for ch in chars:
        if ch == "\\":
            out.append(next(chars, ""))
        else:
            out.append(ch)
    return "".join(out)


def entailment_compose(premise: str, hypothesis: str) -> str:
    """Join a premise and hypothesis into one query text.

    The separator " ||| " frames the fields; literal pipes inside either
    field are backslash-escaped so the frame never collides and
    `entailment_split` recovers both fields exactly.
    """
    return (
        f"{_escape_pair_field(premise)} {PAIR_SEPARATOR} "
        f"{_escape_pair_field(hypothesis)}"
    )


def entailment_split(text: str) -> tuple[str, str]:
    """Inverse of `entailment_compose`."""
    head, sep, tail = text.partition(f" {PAIR_SEPARATOR} ")
    if not sep:
        raise ValueError("text does not contain the pair separator")
    return _unescape_pair_field(head), _unescape_pair_field(tail)


def query_text(doc: Document) -> str:
    """Model-facing text of a document.

    Rebuilt from tokens so queries stay consistent across deletions and
    substitutions; entailment documents compose context and tokens.
    """
    body = detokenize(doc)
    if doc.context is not None:
        return entailment_compose(detokenize(doc.context), body)
    return body
