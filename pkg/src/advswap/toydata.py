"""Deterministic desk-scale fixtures: embeddings, corpora, and worlds.

The vocabulary comes in same-meaning clusters built around mutually
near-orthogonal base directions, so cosine neighbors are exactly the
cluster mates. The first two members of each cluster are "common" (close
to the base, frequent in training data); the rest are "rare" (farther
from the base, and appearing in training mostly as ironic mentions under
the opposite sentiment label). A trained bag-of-words model therefore
reads common polarity words as strong evidence, while their rare
synonyms pull the other way: exactly the terrain a substitution attack
exploits.

Run `python -m advswap.toydata --out-dir DIR` to materialize the files
for command-line use.
"""

from __future__ import annotations

import argparse
import random
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingStore
from .evaluation import CorpusRecord, LabeledCorpus, save_corpus
from .text import POSTagger, bundled_stopwords

POSITIVE = "pos"
NEGATIVE = "neg"

COMMON_PER_CLUSTER = 2

# concept -> (polarity, coarse POS, members). Polarity +1/-1 words carry
# the label signal; 0 words are scenery. The first two members of a
# cluster are "common"; the remainder splits into "mid" (geometrically
# close to the commons, mildly opposite-labeled in training) and "rare"
# (farther out, strongly opposite-labeled).
CLUSTERS: dict[str, tuple[int, str, tuple[str, ...]]] = {
    "good": (+1, "ADJ", ("good", "great", "fine", "nice", "lovely", "superb", "wonderful", "splendid")),
    "bad": (-1, "ADJ", ("bad", "awful", "terrible", "dreadful", "horrid", "nasty", "lousy", "rotten")),
    "funny": (+1, "ADJ", ("funny", "hilarious", "amusing", "comic", "droll", "comedic")),
    "boring": (-1, "ADJ", ("boring", "dull", "tedious", "dreary", "monotonous", "humdrum")),
    "smart": (+1, "ADJ", ("smart", "clever", "bright", "brilliant", "ingenious", "astute")),
    "weak": (-1, "ADJ", ("weak", "feeble", "flimsy", "fragile", "frail", "shaky")),
    "love": (+1, "VERB", ("love", "adore", "cherish", "admire", "relish", "treasure")),
    "hate": (-1, "VERB", ("hate", "loathe", "despise", "detest", "abhor", "resent")),
    "praise": (+1, "VERB", ("praise", "applaud", "commend", "salute", "endorse", "acclaim")),
    "mock": (-1, "VERB", ("mock", "ridicule", "deride", "taunt", "scorn", "jeer")),
    "movie": (0, "NOUN", ("movie", "film", "picture", "flick")),
    "plot": (0, "NOUN", ("plot", "story", "narrative", "storyline")),
    "actor": (0, "NOUN", ("actor", "performer", "artist", "thespian")),
    "music": (0, "NOUN", ("music", "score", "soundtrack", "melody")),
    "scene": (0, "NOUN", ("scene", "sequence", "shot", "segment")),
    "ending": (0, "NOUN", ("ending", "finale", "conclusion", "climax")),
    "dialogue": (0, "NOUN", ("dialogue", "script", "writing", "banter")),
    "director": (0, "NOUN", ("director", "filmmaker", "auteur", "creator")),
    "really": (0, "ADV", ("really", "truly", "genuinely", "honestly")),
    "quite": (0, "ADV", ("quite", "fairly", "rather", "somewhat")),
    "totally": (0, "ADV", ("totally", "completely", "entirely", "utterly")),
}

# In the bundled lexicon but deliberately absent from the toy embedding
# store, so substitution never touches them.
FILLER_NOUNS = ("audience", "evening", "crowd", "pace", "tone", "mood")


@dataclass(frozen=True)
class ToyWorld:
    store: EmbeddingStore
    tagger: POSTagger
    stopwords: frozenset[str]
    train: LabeledCorpus
    attack_set: LabeledCorpus


def cluster_members(
    polarity: int | None = None, pos: str | None = None
) -> list[tuple[str, ...]]:
    """Member tuples of every cluster, filtered by polarity and/or POS."""
    return [
        words
        for pol, tag, words in CLUSTERS.values()
        if (polarity is None or pol == polarity) and (pos is None or tag == pos)
    ]


def _tier(words: tuple[str, ...], position: int) -> str:
    if position < COMMON_PER_CLUSTER:
        return "common"
    return "rare" if position == len(words) - 1 else "mid"


def tier_of(word: str) -> str:
    for _, _, words in CLUSTERS.values():
        if word in words:
            return _tier(words, words.index(word))
    raise KeyError(word)


def build_store(
    seed: int = 7,
    dimension: int = 50,
    common_noise: float = 0.18,
    mid_noise: float = 0.20,
    rare_noise: float = 0.8,
) -> EmbeddingStore:
    """Embedding store over the cluster vocabulary.

    Cluster bases are exactly orthogonal (QR of a random matrix), so
    cross-cluster cosines stay small while cluster mates stay above the
    usual 0.7 synonym threshold. Mid members sit almost on top of the
    commons; rare members are measurably farther while still passing the
    threshold, which gives sentence-similarity gating something real to
    separate.
    """
    if len(CLUSTERS) > dimension:
        raise ValueError("need at least one dimension per cluster")
    scales = {"common": common_noise, "mid": mid_noise, "rare": rare_noise}
    rng = np.random.default_rng(seed)
    bases, _ = np.linalg.qr(rng.normal(size=(dimension, dimension)))
    vectors: dict[str, np.ndarray] = {}
    for row, (_, _, words) in enumerate(CLUSTERS.values()):
        base = bases[row]
        for position, word in enumerate(words):
            noise = rng.normal(size=dimension)
            noise /= np.linalg.norm(noise)
            vectors[word] = base + scales[_tier(words, position)] * noise
    return EmbeddingStore.from_dict(vectors)


def write_embeddings(store: EmbeddingStore, path: str, header: bool = True) -> None:
    """Write a store in the plain-text format `load_embeddings` reads."""
    with open(path, "w", encoding="utf-8") as handle:
        if header:
            handle.write(f"{len(store)} {store.dimension}\n")
        for word in store.words:
            values = " ".join(f"{v:.8f}" for v in store.vector(word))
            handle.write(f"{word} {values}\n")


def _ironic_opposites(label: str, pos: str) -> list[str]:
    """Non-common words of opposite polarity, rare tier heavily weighted."""
    opposite = -1 if label == POSITIVE else +1
    words: list[str] = []
    for members in cluster_members(opposite, pos):
        for position in range(COMMON_PER_CLUSTER, len(members)):
            weight = 6 if _tier(members, position) == "rare" else 1
            words.extend([members[position]] * weight)
    return words


def _make_text(
    rng: random.Random,
    label: str,
    target_length: int,
    ironic_rate: float,
    contrast_rate: float,
) -> str:
    polarity = +1 if label == POSITIVE else -1
    nouns = cluster_members(0, "NOUN")
    adverbs = cluster_members(0, "ADV")
    adjectives = cluster_members(polarity, "ADJ")
    verbs = cluster_members(polarity, "VERB")

    def common(members: tuple[str, ...]) -> str:
        return rng.choice(members[:COMMON_PER_CLUSTER])

    # at least three sentiment-bearing words per document, so no single
    # substitution can carry the whole label signal
    tokens: list[str] = []
    polar = 0
    while len(tokens) < max(4, target_length - 2) or polar < 3:
        pattern = rng.randrange(3)
        noun = common(rng.choice(nouns))
        if pattern == 0:
            tokens += ["the", noun, "was", common(rng.choice(adverbs)),
                       common(rng.choice(adjectives))]
            polar += 1
        elif pattern == 1:
            tokens += ["i", common(rng.choice(verbs)), "the", noun]
            polar += 1
        else:
            tokens += ["the", noun, "was", common(rng.choice(adjectives)), "and",
                       rng.choice(["the", "that"]), common(rng.choice(nouns)),
                       "was", common(rng.choice(adjectives))]
            polar += 2
        if rng.random() < 0.25:
            tokens += ["with", "the", rng.choice(FILLER_NOUNS)]
        if len(tokens) < target_length - 2 or polar < 3:
            tokens.append(",")
    # a single dissenting clause: common word of the other sentiment,
    # softening per-word class margins the way mixed reviews do
    if rng.random() < contrast_rate:
        tokens += ["but", "the", common(rng.choice(nouns)), "was",
                   common(rng.choice(cluster_members(-polarity, "ADJ")))]
    # ironic mention of a non-common opposite word; training corpora use
    # this to give mid/rare synonyms opposite-label evidence
    if rng.random() < ironic_rate:
        if rng.random() < 0.5:
            tokens += ["the", common(rng.choice(nouns)), "was",
                       rng.choice(_ironic_opposites(label, "ADJ"))]
        else:
            tokens += ["i", rng.choice(_ironic_opposites(label, "VERB")),
                       "the", common(rng.choice(nouns))]
    tokens.append(rng.choice([".", "!"]))
    return _join(tokens)


def _join(tokens: list[str]) -> str:
    out = ""
    for tok in tokens:
        if tok in {",", ".", "!"}:
            out += tok
        else:
            out += (" " if out else "") + tok
    return out


def make_corpus(
    seed: int,
    size: int,
    mean_length: int = 12,
    ironic_rate: float = 0.0,
    contrast_rate: float = 0.0,
) -> LabeledCorpus:
    """Balanced two-label corpus of synthetic reviews.

    `ironic_rate` is the chance a document mentions one non-common word
    of the opposite sentiment, `contrast_rate` the chance of a dissenting
    clause using an opposite common word; both belong in training corpora
    (they shape the evidence structure) and default off for attack sets,
    whose documents therefore read as pure own-label text the model gets
    right.
    """
    rng = random.Random(seed)
    records = []
    for i in range(size):
        label = POSITIVE if i % 2 == 0 else NEGATIVE
        length = max(6, int(rng.gauss(mean_length, mean_length * 0.15)))
        records.append(
            CorpusRecord(
                text=_make_text(rng, label, length, ironic_rate, contrast_rate),
                label=label,
            )
        )
    return LabeledCorpus(records=tuple(records))


def build_world(
    seed: int = 2024,
    train_size: int = 240,
    attack_size: int = 200,
    mean_length: int = 11,
    ironic_rate: float = 0.9,
    contrast_rate: float = 0.65,
) -> ToyWorld:
    """One-stop fixture: store, tagger, stop words, train and attack corpora."""
    return ToyWorld(
        store=build_store(seed=seed),
        tagger=POSTagger.bundled(),
        stopwords=bundled_stopwords(),
        train=make_corpus(seed + 1, train_size, mean_length, ironic_rate, contrast_rate),
        attack_set=make_corpus(seed + 2, attack_size, mean_length),
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Write the synthetic desk fixtures to disk."
    )
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--train-size", type=int, default=240)
    parser.add_argument("--attack-size", type=int, default=200)
    parser.add_argument("--mean-length", type=int, default=12)
    args = parser.parse_args(argv)

    import os

    os.makedirs(args.out_dir, exist_ok=True)
    world = build_world(
        seed=args.seed,
        train_size=args.train_size,
        attack_size=args.attack_size,
        mean_length=args.mean_length,
    )
    write_embeddings(world.store, os.path.join(args.out_dir, "embeddings.txt"))
    save_corpus(world.train, os.path.join(args.out_dir, "train.tsv"))
    save_corpus(world.attack_set, os.path.join(args.out_dir, "attack.tsv"))
    print(f"wrote embeddings.txt, train.tsv, attack.tsv to {args.out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
