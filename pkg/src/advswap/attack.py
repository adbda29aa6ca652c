"""The greedy substitution attack.

For each document: rank tokens by deletion importance (or shuffle them
for the random-order ablation), then walk the ranking. At every token,
pull same-meaning candidates from the embedding store, drop those with a
different part of speech, gate the rest on sentence similarity, and
query the model only for survivors. A candidate that already flips the
prediction ends the attack; otherwise the candidate that most erodes the
original label's confidence is substituted and the walk continues.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .embeddings import EmbeddingStore, SynonymCandidate
from .errors import ConfigurationError
from .importance import importance_scores, rank_words
from .similarity import SentenceEncoder, sentence_similarity
from .target import CountingModel, TargetModel, query_text
from .text import Document, POSTagger, Token, replace_token

SIM_ORIGINAL = "original"
SIM_CURRENT = "current"

SUCCESS = "success"
FAILED = "failed"

TERMINAL = "terminal"
CONTINUE = "continue"
SKIP = "skip"


@dataclass(frozen=True)
class AttackConfig:
    """All attack hyperparameters and ablation switches.

    `epsilon` (the minimum sentence similarity an accepted rewrite must
    keep) has no universal default and must be chosen by the operator.
    `perturb_ratio` bounds how many token positions the random-order
    ablation may visit, as a fraction of eligible tokens; it is ignored
    when importance ranking is on.
    """

    epsilon: float
    n_synonyms: int = 50
    delta: float = 0.7
    use_importance: bool = True
    use_sim_constraint: bool = True
    use_pos_filter: bool = True
    sim_reference: str = SIM_ORIGINAL
    random_seed: int = 0
    perturb_ratio: float | None = None

    def __post_init__(self) -> None:
        if self.n_synonyms < 1:
            raise ConfigurationError("n_synonyms must be >= 1")
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigurationError("delta must lie in [0, 1]")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError("epsilon must lie in [0, 1]")
        if self.sim_reference not in (SIM_ORIGINAL, SIM_CURRENT):
            raise ConfigurationError(
                f"sim_reference must be {SIM_ORIGINAL!r} or {SIM_CURRENT!r}"
            )
        if self.perturb_ratio is not None and not 0.0 < self.perturb_ratio <= 1.0:
            raise ConfigurationError("perturb_ratio must lie in (0, 1]")


@dataclass(frozen=True)
class Substitution:
    token_index: int
    original: str
    replacement: str
    similarity_at_accept: float
    candidate_pool_size: int


@dataclass(frozen=True)
class ScoredCandidate:
    """A candidate that passed the similarity gate and was scored."""

    word: str
    similarity: float
    label_index: int
    confidence: float


@dataclass(frozen=True)
class Decision:
    kind: str
    choice: ScoredCandidate | None = None


@dataclass(frozen=True)
class AttackResult:
    status: str
    original_label: str
    queries: int
    substitutions: tuple[Substitution, ...] = ()
    adversarial: Document | None = None
    adversarial_label: str | None = None
    final_similarity: float | None = None

    @property
    def success(self) -> bool:
        return self.status == SUCCESS


def extract_candidates(
    token: Token,
    store: EmbeddingStore,
    config: AttackConfig,
    tagger: POSTagger,
) -> list[SynonymCandidate]:
    """Synonym candidates for one token: nearest neighbors, then POS filter."""
    candidates = store.nearest_synonyms(
        token.normalized, config.n_synonyms, config.delta
    )
    if config.use_pos_filter:
        candidates = [c for c in candidates if tagger.tag(c.word) == token.pos]
    return [c for c in candidates if c.word != token.normalized]


def filter_by_similarity(
    base: Document,
    token_index: int,
    candidates: list[SynonymCandidate],
    reference: Document,
    epsilon: float,
    encoder: SentenceEncoder,
    model: TargetModel,
    enforce: bool = True,
) -> list[ScoredCandidate]:
    """Similarity-gate the candidates, then score survivors on the model.

    Similarity is checked before any model traffic, so queries advance by
    exactly the number of candidates passing the gate. With `enforce`
    off the gate is open, but degenerate (unencodable) rewrites are still
    excluded. Similarities are recorded either way.
    """
    survivors: list[tuple[SynonymCandidate, float, Document]] = []
    for candidate in candidates:
        variant = replace_token(base, token_index, candidate.word)
        sim = sentence_similarity(variant, reference, encoder)
        if sim.degenerate:
            continue
        if enforce and sim.value < epsilon:
            continue
        survivors.append((candidate, sim.value, variant))
    if not survivors:
        return []
    distributions = model.predict_batch([query_text(v) for _, _, v in survivors])
    return [
        ScoredCandidate(
            word=candidate.word,
            similarity=sim,
            label_index=dist.top_index,
            confidence=dist[dist.top_index],
        )
        for (candidate, sim, _), dist in zip(survivors, distributions)
    ]


def choose_replacement(
    pool: list[ScoredCandidate],
    original_label_index: int,
    current_confidence: float,
) -> Decision:
    """Pick the substitution for one token from its scored pool.

    A label-flipping candidate wins outright; among several, the one with
    the highest similarity (then the stronger flip, then the earlier
    word). With no flip available, the candidate that lowers the original
    label's confidence the most is taken, provided it actually lowers it
    (ties: higher similarity, then earlier word); otherwise the token is
    left unchanged.
    """
    if not pool:
        return Decision(SKIP)
    flips = [c for c in pool if c.label_index != original_label_index]
    if flips:
        best = min(flips, key=lambda c: (-c.similarity, -c.confidence, c.word))
        return Decision(TERMINAL, best)
    best = min(pool, key=lambda c: (c.confidence, -c.similarity, c.word))
    if best.confidence < current_confidence:
        return Decision(CONTINUE, best)
    return Decision(SKIP)


def _visit_order(doc: Document, config: AttackConfig, counting: CountingModel, original) -> list[int]:
    if config.use_importance:
        scores = importance_scores(doc, counting, original=original)
        return rank_words(scores, doc)
    eligible = [t.index for t in doc.tokens if not t.is_stop]
    rng = random.Random(config.random_seed)
    if config.perturb_ratio is not None:
        budget = min(len(eligible), max(1, int(config.perturb_ratio * len(eligible))))
        return rng.sample(eligible, budget) if eligible else []
    rng.shuffle(eligible)
    return eligible


def attack(
    doc: Document,
    model: TargetModel,
    config: AttackConfig,
    store: EmbeddingStore,
    encoder: SentenceEncoder,
    tagger: POSTagger,
    *,
    original=None,
) -> AttackResult:
    """Run the full greedy attack on one annotated document.

    The document must already carry POS tags and stop-word marks. Pass a
    `CountingModel` as `model` together with the `original` distribution
    it produced to fold a caller-side correctness check into this run's
    query count; otherwise the model is wrapped fresh and the intact
    document is queried here. Transport failures propagate as exceptions
    rather than being folded into a FAILED result.
    """
    if not doc.tokens:
        raise ValueError("cannot attack an empty document")
    counting = model if isinstance(model, CountingModel) else CountingModel(model)
    if original is None:
        original = counting.predict_batch([query_text(doc)])[0]
    label_index = original.top_index
    original_label = counting.labels[label_index]
    current_confidence = original[label_index]

    order = _visit_order(doc, config, counting, original)
    adversarial = doc
    substitutions: list[Substitution] = []
    gate_passes = 0

    for index in order:
        token = adversarial.tokens[index]
        candidates = extract_candidates(token, store, config, tagger)
        if not candidates:
            continue
        reference = doc if config.sim_reference == SIM_ORIGINAL else adversarial
        pool = filter_by_similarity(
            adversarial,
            index,
            candidates,
            reference,
            config.epsilon,
            encoder,
            counting,
            enforce=config.use_sim_constraint,
        )
        gate_passes += len(pool)
        decision = choose_replacement(pool, label_index, current_confidence)
        if decision.kind == SKIP:
            continue
        chosen = decision.choice
        adversarial = replace_token(adversarial, index, chosen.word, tagger=tagger)
        substitutions.append(
            Substitution(
                token_index=index,
                original=token.surface,
                replacement=chosen.word,
                similarity_at_accept=chosen.similarity,
                candidate_pool_size=len(pool),
            )
        )
        if decision.kind == TERMINAL:
            if config.sim_reference == SIM_ORIGINAL:
                final_similarity = chosen.similarity
            else:
                final_similarity = sentence_similarity(adversarial, doc, encoder).value
            queries = counting.counter.count
            assert queries <= len(doc.tokens) + 1 + gate_passes
            return AttackResult(
                status=SUCCESS,
                original_label=original_label,
                queries=queries,
                substitutions=tuple(substitutions),
                adversarial=adversarial,
                adversarial_label=counting.labels[chosen.label_index],
                final_similarity=final_similarity,
            )
        current_confidence = chosen.confidence

    queries = counting.counter.count
    assert queries <= len(doc.tokens) + 1 + gate_passes
    return AttackResult(
        status=FAILED,
        original_label=original_label,
        queries=queries,
        substitutions=tuple(substitutions),
    )
