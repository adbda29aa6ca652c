"""Deletion-based word importance scoring and ranking.

A token's importance is the change in the model's prediction scores when
that token is removed: the drop in the original label's probability,
plus, when the predicted label flips, the rise of the new label's
probability. Scoring a document of n tokens costs exactly n + 1 model
evaluations (one for the intact text, one per deletion, batched).
"""

from __future__ import annotations

from dataclasses import dataclass

from .target import LabelDistribution, TargetModel, query_text
from .text import Document, delete_token


@dataclass(frozen=True)
class ImportanceScore:
    token_index: int
    score: float


def importance_scores(
    doc: Document,
    model: TargetModel,
    original: LabelDistribution | None = None,
) -> list[ImportanceScore]:
    """Score every mutable token of the document by deletion impact.

    Context tokens are never deleted. Pass `original` to reuse an
    already-obtained prediction for the intact document (the deletion
    batch is then the only model traffic).
    """
    if not doc.tokens:
        raise ValueError("document has no mutable tokens")
    if original is None:
        original = model.predict_batch([query_text(doc)])[0]
    label = original.top_index
    base = original[label]
    deletions = [query_text(delete_token(doc, i)) for i in range(len(doc.tokens))]
    scores: list[ImportanceScore] = []
    for i, dist in enumerate(model.predict_batch(deletions)):
        after_label = dist.top_index
        score = base - dist[label]
        if after_label != label:
            score += dist[after_label] - original[after_label]
        scores.append(ImportanceScore(token_index=i, score=score))
    return scores


def rank_words(
    scores: list[ImportanceScore],
    doc: Document,
    stopwords: frozenset[str] | None = None,
) -> list[int]:
    """Token indices ordered by descending importance, stop words removed.

    Ties break toward the leftmost token. When `stopwords` is omitted the
    tokens' own `is_stop` flags decide.
    """

    def stopped(index: int) -> bool:
        token = doc.tokens[index]
        if stopwords is not None:
            return token.normalized in stopwords
        return token.is_stop

    ordered = sorted(scores, key=lambda s: (-s.score, s.token_index))
    return [s.token_index for s in ordered if not stopped(s.token_index)]
