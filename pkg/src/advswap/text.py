"""Tokenization, detokenization, part-of-speech tagging, and stop words.

Tokens keep their original surface form; `normalized` is the lowercased
surface used for every vocabulary lookup. Punctuation is detached from
word edges into single-character tokens so that substitution never has
to reason about attached commas or quotes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping

from .errors import ConfigurationError

NOUN = "NOUN"
VERB = "VERB"
ADJ = "ADJ"
ADV = "ADV"
OTHER = "OTHER"
COARSE_TAGS = frozenset({NOUN, VERB, ADJ, ADV, OTHER})

# Checked in order after a lexicon miss; a rule fires only when at least
# two characters of stem remain.
_SUFFIX_RULES: tuple[tuple[str, str], ...] = (
    ("ly", ADV),
    ("ing", VERB),
    ("ed", VERB),
    ("ize", VERB),
    ("ise", VERB),
    ("ous", ADJ),
    ("ful", ADJ),
    ("ive", ADJ),
    ("able", ADJ),
    ("ible", ADJ),
    ("less", ADJ),
    ("ish", ADJ),
    ("ness", NOUN),
    ("ment", NOUN),
    ("tion", NOUN),
    ("sion", NOUN),
    ("ity", NOUN),
)


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    pos: str = OTHER
    is_stop: bool = False
    index: int = 0

    @property
    def is_punct(self) -> bool:
        """True when the surface carries no letters or digits at all."""
        return not any(ch.isalnum() for ch in self.surface)


@dataclass(frozen=True)
class Document:
    """An ordered token sequence plus an optional immutable context.

    `tokens` is the mutable field an attack may rewrite; `context` holds
    e.g. an entailment premise and is never touched by any operation here.
    """

    tokens: tuple[Token, ...]
    context: tuple[Token, ...] | None = None
    raw: str = ""

    def __len__(self) -> int:
        return len(self.tokens)


def _token(surface: str, index: int) -> Token:
    return Token(surface=surface, normalized=surface.lower(), index=index)


def tokenize(raw: str) -> Document:
    """Split text on whitespace, detaching edge punctuation.

    Each whitespace-separated chunk becomes one word token, preceded and
    followed by one token per leading/trailing non-alphanumeric character.
    Internal punctuation ("don't", "3.5") stays inside the word.
    """
    surfaces: list[str] = []
    for chunk in raw.split():
        lead: list[str] = []
        trail: list[str] = []
        while chunk and not chunk[0].isalnum():
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and not chunk[-1].isalnum():
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        surfaces.extend(lead)
        if chunk:
            surfaces.append(chunk)
        surfaces.extend(reversed(trail))
    tokens = tuple(_token(s, i) for i, s in enumerate(surfaces))
    return Document(tokens=tokens, raw=raw)


def detokenize(doc: Document | Iterable[Token]) -> str:
    """Join tokens with single spaces, attaching punctuation to the left.

    Inverse of `tokenize` up to whitespace: re-tokenizing the output
    yields the same token sequence.
    """
    tokens = doc.tokens if isinstance(doc, Document) else tuple(doc)
    parts: list[str] = []
    for tok in tokens:
        if tok.is_punct and parts:
            parts[-1] += tok.surface
        else:
            parts.append(tok.surface)
    return " ".join(parts)


class POSTagger:
    """Coarse word-form tagger: lexicon lookup, then suffix rules, then OTHER.

    The lexicon maps lowercased word forms to one of the coarse tags. Any
    precomputed tag source can be supplied as a plain mapping.
    """

    def __init__(self, lexicon: Mapping[str, str] | None = None):
        self._lexicon: dict[str, str] = {}
        for word, tag in (lexicon or {}).items():
            if tag not in COARSE_TAGS:
                raise ConfigurationError(f"unknown POS tag {tag!r} for word {word!r}")
            self._lexicon[word.lower()] = tag

    @classmethod
    def from_file(cls, path: str) -> "POSTagger":
        """Load a lexicon of "word<TAB>TAG" lines (UTF-8, blanks skipped)."""
        lexicon: dict[str, str] = {}
        try:
            with open(path, encoding="utf-8") as handle:
                for lineno, line in enumerate(handle, start=1):
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    fields = line.split("\t")
                    if len(fields) != 2:
                        raise ConfigurationError(
                            f"{path}:{lineno}: expected 'word<TAB>TAG', got {line!r}"
                        )
                    word, tag = fields
                    if tag not in COARSE_TAGS:
                        raise ConfigurationError(f"{path}:{lineno}: unknown POS tag {tag!r}")
                    lexicon.setdefault(word.lower(), tag)
        except OSError as exc:
            raise ConfigurationError(f"cannot read POS lexicon {path}: {exc}") from exc
        return cls(lexicon)

    @classmethod
    def bundled(cls) -> "POSTagger":
        """Tagger backed by the lexicon shipped with the package."""
        path = resources.files("advswap.data") / "pos_lexicon.tsv"
        return cls.from_file(str(path))

    def tag(self, word: str) -> str:
        word = word.lower()
        hit = self._lexicon.get(word)
        if hit is not None:
            return hit
        for suffix, tag in _SUFFIX_RULES:
            if word.endswith(suffix) and len(word) >= len(suffix) + 2:
                return tag
        return OTHER


def tag_pos(doc: Document, tagger: POSTagger) -> Document:
    """Return a copy of the document with every token tagged."""
    tokens = tuple(dataclasses.replace(t, pos=tagger.tag(t.normalized)) for t in doc.tokens)
    return dataclasses.replace(doc, tokens=tokens)


def load_stopwords(path: str) -> frozenset[str]:
    """Load a stop-word list: one lowercase word per line, '#' comments."""
    words: set[str] = set()
    try:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                words.add(line.lower())
    except OSError as exc:
        raise ConfigurationError(f"cannot read stop-word list {path}: {exc}") from exc
    return frozenset(words)


def bundled_stopwords(include_extra: bool = False) -> frozenset[str]:
    """The stop-word list shipped with the package.

    `include_extra` unions in the second, broader list.
    """
    base = load_stopwords(str(resources.files("advswap.data") / "stopwords.txt"))
    if not include_extra:
        return base
    extra = load_stopwords(str(resources.files("advswap.data") / "stopwords_extra.txt"))
    return base | extra


def is_stop(token: Token, stopwords: frozenset[str]) -> bool:
    """Case-insensitive membership of the token in the stop list."""
    return token.normalized in stopwords


def mark_stopwords(doc: Document, stopwords: frozenset[str]) -> Document:
    tokens = tuple(
        dataclasses.replace(t, is_stop=is_stop(t, stopwords)) for t in doc.tokens
    )
    return dataclasses.replace(doc, tokens=tokens)


def annotate(doc: Document, tagger: POSTagger, stopwords: frozenset[str]) -> Document:
    """Tag every token and mark stop words in one pass."""
    return mark_stopwords(tag_pos(doc, tagger), stopwords)


def delete_token(doc: Document, index: int) -> Document:
    """Document with token `index` removed and positions reindexed."""
    kept = [t for t in doc.tokens if t.index != index]
    tokens = tuple(dataclasses.replace(t, index=i) for i, t in enumerate(kept))
    return dataclasses.replace(doc, tokens=tokens)


def replace_token(
    doc: Document,
    index: int,
    surface: str,
    tagger: POSTagger | None = None,
) -> Document:
    """Document with token `index` swapped for `surface`.

    The replacement is treated as a content word (never a stop word); its
    tag is recomputed when a tagger is given, otherwise inherited.
    """
    old = doc.tokens[index]
    new = Token(
        surface=surface,
        normalized=surface.lower(),
        pos=tagger.tag(surface) if tagger is not None else old.pos,
        is_stop=False,
        index=index,
    )
    tokens = doc.tokens[:index] + (new,) + doc.tokens[index + 1 :]
    return dataclasses.replace(doc, tokens=tokens)


def word_count(doc: Document) -> int:
    """Number of non-punctuation tokens in the mutable field."""
    return sum(1 for t in doc.tokens if not t.is_punct)
