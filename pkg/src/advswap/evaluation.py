"""Campaign runner and the automatic attack metrics.

A campaign attacks every record the model originally classifies
correctly; records it already gets wrong count as wrong in the
after-attack accuracy and are excluded from the perturbation, similarity
and query averages. Perturbation rates divide by the number of
non-punctuation tokens of the mutable field.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .attack import FAILED, SUCCESS, AttackConfig, AttackResult, attack
from .embeddings import EmbeddingStore
from .errors import FormatError, RemoteError
from .similarity import SentenceEncoder
from .target import CountingModel, TargetModel, query_text
from .text import Document, POSTagger, annotate, detokenize, tokenize, word_count

PERTURBATION_DENOMINATOR = "non_punctuation_tokens"


@dataclass(frozen=True)
class CorpusRecord:
    text: str
    label: str
    premise: str | None = None


@dataclass(frozen=True)
class LabeledCorpus:
    records: tuple[CorpusRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def pairs(self) -> list[tuple[str, str]]:
        """(query text, label) pairs for classifier training."""
        out = []
        for record in self.records:
            doc = prepare_document(record)
            out.append((query_text(doc), record.label))
        return out


def prepare_document(
    record: CorpusRecord,
    tagger: POSTagger | None = None,
    stopwords: frozenset[str] | None = None,
) -> Document:
    """Tokenize and annotate one record; the premise becomes the context."""
    doc = tokenize(record.text)
    if record.premise is not None:
        doc = dataclasses.replace(doc, context=tokenize(record.premise).tokens)
    if tagger is not None and stopwords is not None:
        doc = annotate(doc, tagger, stopwords)
    return doc


def load_corpus(path: str) -> LabeledCorpus:
    """Read a UTF-8 TSV corpus: header row, columns label, text[, premise]."""
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot open corpus: {exc}", path=path) from exc
    records: list[CorpusRecord] = []
    with handle:
        header = handle.readline()
        if not header:
            raise FormatError("corpus file is empty (header row required)", path=path)
        columns = header.rstrip("\n").split("\t")
        if columns[:2] != ["label", "text"] or columns[2:] not in ([], ["premise"]):
            raise FormatError(
                f"header must be 'label\\ttext[\\tpremise]', got {columns}",
                path=path,
                line=1,
            )
        width = len(columns)
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != width:
                raise FormatError(
                    f"expected {width} fields, found {len(fields)}",
                    path=path,
                    line=lineno,
                )
            premise = fields[2] if width == 3 and fields[2] else None
            records.append(
                CorpusRecord(text=fields[1], label=fields[0], premise=premise)
            )
    return LabeledCorpus(records=tuple(records))


def save_corpus(corpus: LabeledCorpus, path: str) -> None:
    """Write a corpus in the TSV format `load_corpus` reads."""
    with_premise = any(r.premise is not None for r in corpus.records)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("label\ttext\tpremise\n" if with_premise else "label\ttext\n")
        for record in corpus.records:
            for name, value in (("label", record.label), ("text", record.text),
                                ("premise", record.premise or "")):
                if "\t" in value or "\n" in value:
                    raise FormatError(f"{name} field contains a tab or newline", path=path)
            if with_premise:
                handle.write(f"{record.label}\t{record.text}\t{record.premise or ''}\n")
            else:
                handle.write(f"{record.label}\t{record.text}\n")


@dataclass(frozen=True)
class SampleOutcome:
    """One corpus record's fate within a campaign."""

    index: int
    record: CorpusRecord
    document: Document
    original_label: str
    attacked: bool
    result: AttackResult | None = None

    @property
    def succeeded(self) -> bool:
        return self.result is not None and self.result.success


@dataclass(frozen=True)
class CampaignReport:
    original_accuracy: float
    after_attack_accuracy: float
    success_rate: float | None
    perturbed_word_pct: float | None
    avg_similarity: float | None
    avg_queries: float | None
    total: int
    attacked: int
    successes: int
    incomplete: bool
    per_sample: tuple[SampleOutcome, ...]

    def to_dict(self) -> dict:
        """JSON-ready form, deterministic for identical campaigns."""
        samples = []
        for outcome in self.per_sample:
            entry: dict = {
                "index": outcome.index,
                "label": outcome.record.label,
                "original_prediction": outcome.original_label,
                "attacked": outcome.attacked,
            }
            result = outcome.result
            if result is not None:
                entry["status"] = result.status
                entry["queries"] = result.queries
                entry["substitutions"] = [
                    {
                        "token_index": s.token_index,
                        "original": s.original,
                        "replacement": s.replacement,
                        "similarity": s.similarity_at_accept,
                        "pool_size": s.candidate_pool_size,
                    }
                    for s in result.substitutions
                ]
                if result.success:
                    entry["adversarial_text"] = detokenize(result.adversarial)
                    entry["adversarial_label"] = result.adversarial_label
                    entry["final_similarity"] = result.final_similarity
                    entry["perturbation_rate"] = perturbation_rate(
                        result, outcome.document
                    )
            samples.append(entry)
        return {
            "original_accuracy": self.original_accuracy,
            "after_attack_accuracy": self.after_attack_accuracy,
            "success_rate": self.success_rate,
            "perturbed_word_pct": self.perturbed_word_pct,
            "avg_similarity": self.avg_similarity,
            "avg_queries": self.avg_queries,
            "total": self.total,
            "attacked": self.attacked,
            "successes": self.successes,
            "incomplete": self.incomplete,
            "perturbation_denominator": PERTURBATION_DENOMINATOR,
            "per_sample": samples,
        }


def perturbation_rate(result: AttackResult, doc: Document) -> float:
    """Substituted words over non-punctuation words of the mutable field."""
    if not result.success:
        raise ValueError("perturbation rate is defined for successful attacks only")
    return len(result.substitutions) / word_count(doc)


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def run_campaign(
    corpus: LabeledCorpus,
    model: TargetModel,
    config: AttackConfig,
    store: EmbeddingStore,
    encoder: SentenceEncoder,
    tagger: POSTagger,
    stopwords: frozenset[str],
    workers: int = 1,
) -> CampaignReport:
    """Attack a whole corpus and aggregate the automatic metrics.

    Samples are independent; with `workers` > 1 they run in a thread
    pool, and per-sample outcomes keep corpus order either way. The
    random-ablation seed is derived per sample from the config seed, so
    reports are reproducible regardless of scheduling. A remote failure
    aborts outstanding work and flags the report incomplete.
    """
    if not corpus.records:
        raise ValueError("corpus is empty")

    def run_one(index: int, record: CorpusRecord) -> SampleOutcome:
        document = prepare_document(record, tagger, stopwords)
        counting = CountingModel(model)
        original = counting.predict_batch([query_text(document)])[0]
        predicted = counting.labels[original.top_index]
        if predicted != record.label:
            return SampleOutcome(
                index=index,
                record=record,
                document=document,
                original_label=predicted,
                attacked=False,
            )
        sample_config = dataclasses.replace(
            config, random_seed=config.random_seed + index
        )
        result = attack(
            document, counting, sample_config, store, encoder, tagger,
            original=original,
        )
        return SampleOutcome(
            index=index,
            record=record,
            document=document,
            original_label=predicted,
            attacked=True,
            result=result,
        )

    outcomes: list[SampleOutcome] = []
    incomplete = False
    if workers <= 1:
        try:
            for i, record in enumerate(corpus.records):
                outcomes.append(run_one(i, record))
        except RemoteError:
            incomplete = True
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run_one, i, record)
                for i, record in enumerate(corpus.records)
            ]
            for future in futures:
                try:
                    outcomes.append(future.result())
                except RemoteError:
                    incomplete = True
                    for pending in futures:
                        pending.cancel()
                    break
    outcomes.sort(key=lambda o: o.index)

    total = len(corpus.records)
    attacked = [o for o in outcomes if o.attacked]
    successes = [o for o in attacked if o.succeeded]
    correct = len(attacked)
    return CampaignReport(
        original_accuracy=correct / total,
        after_attack_accuracy=(correct - len(successes)) / total,
        success_rate=len(successes) / len(attacked) if attacked else None,
        perturbed_word_pct=_mean(
            [perturbation_rate(o.result, o.document) for o in successes]
        ),
        avg_similarity=_mean([o.result.final_similarity for o in successes]),
        avg_queries=_mean([float(o.result.queries) for o in attacked]),
        total=total,
        attacked=len(attacked),
        successes=len(successes),
        incomplete=incomplete,
        per_sample=tuple(outcomes),
    )


def transferability_matrix(
    adversary_sets: Sequence[Sequence[CorpusRecord]],
    models: Sequence[TargetModel],
) -> list[list[float | None]]:
    """Cross-model accuracy grid of adversarial examples.

    Entry (i, j) is model j's accuracy on the adversaries generated
    against model i; the diagonal stays empty, and a row with no
    adversaries is undefined.
    """
    if len(adversary_sets) != len(models):
        raise ValueError("one adversary set per model is required")
    if len(models) < 2:
        raise ValueError("transferability needs at least 2 models")
    matrix: list[list[float | None]] = []
    for i, adversaries in enumerate(adversary_sets):
        row: list[float | None] = []
        texts = [query_text(prepare_document(r)) for r in adversaries]
        for j, model in enumerate(models):
            if i == j or not adversaries:
                row.append(None)
                continue
            predictions = model.predict_batch(texts)
            hits = sum(
                1
                for record, dist in zip(adversaries, predictions)
                if model.labels[dist.top_index] == record.label
            )
            row.append(hits / len(adversaries))
        matrix.append(row)
    return matrix


def adversarial_records(
    results: Sequence[AttackResult | None], corpus: LabeledCorpus
) -> list[CorpusRecord]:
    """Successful adversarial texts labeled with their original labels."""
    if len(results) != len(corpus.records):
        raise ValueError("results are not aligned with the corpus")
    records = []
    for record, result in zip(corpus.records, results):
        if result is not None and result.success:
            records.append(
                CorpusRecord(
                    text=detokenize(result.adversarial),
                    label=record.label,
                    premise=record.premise,
                )
            )
    return records


def export_adversarial_training_set(
    results: Sequence[AttackResult | None],
    corpus: LabeledCorpus,
    path: str,
) -> int:
    """Write successful adversaries as a training corpus; returns the count.

    Each exported record keeps the ground-truth label of its original, so
    the file can be concatenated with the original data for retraining.
    """
    records = adversarial_records(results, corpus)
    save_corpus(LabeledCorpus(records=tuple(records)), path)
    return len(records)
