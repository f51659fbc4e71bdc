"""Deterministic text processing shared by retrieval, classification,
summarization, and indexing.

Everything in this module is pure and reproducible: language detection via
stopword hit-ratios, rule-based sentence segmentation with offset-preserving
spans, Unicode tokenization, and a hashed tf-idf vectorizer over word
unigrams plus character 3/4/5-grams.

Feature hashing is FNV-1a 64-bit over the UTF-8 bytes of the feature string,
truncated to the low 18 bits (dimension 2**18). Word features are prefixed
``w=`` and character n-grams ``c=`` before hashing so identical strings from
the two families stay distinct features.

Stopword and abbreviation lists ship as UTF-8 text files under ``data/``
(one entry per line); set the ``SVLINK_DATA_DIR`` environment variable to
load them from another directory.
"""
from __future__ import annotations

import math
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator

from .hashing import fnv1a64

HASH_DIMENSION = 1 << 18
NGRAM_SIZES = (3, 4, 5)
SENTENCE_TERMINATORS = ".!?"

# detect_language() thresholds: the winning ratio and the winner-loser margin.
_MIN_HIT_RATIO = 0.05
_MIN_MARGIN = 0.01

_TOKEN_RE = re.compile(r"[^\W_]+")
_EDGE_STRIP_RE = re.compile(r"^[\W_]+|[\W_]+$")


class EmptyCorpus(ValueError):
    """fit_vectorizer() was called with no documents."""


@dataclass(frozen=True)
class LanguageTag:
    """A detected or declared document language ("en" or "de")."""

    value: str
    confident: bool = True


@dataclass(frozen=True)
class SentenceSpan:
    """A sentence of a larger text, addressed by Unicode scalar offsets.

    ``text`` is exactly ``full_text[start:end]`` with surrounding whitespace
    already excluded from the offsets.
    """

    index: int
    start: int
    end: int
    text: str


@dataclass
class TermVector:
    """Sparse non-negative feature vector with a cached Euclidean norm."""

    entries: dict[int, float] = field(default_factory=dict)
    norm: float = 0.0

    @classmethod
    def from_weights(cls, weights: dict[int, float]) -> "TermVector":
        entries = {fid: w for fid, w in weights.items() if w > 0.0}
        norm = math.sqrt(sum(w * w for w in entries.values()))
        return cls(entries=entries, norm=norm)

    def is_empty(self) -> bool:
        return not self.entries

    def dot(self, other: "TermVector") -> float:
        a, b = self.entries, other.entries
        if len(b) < len(a):
            a, b = b, a
        return sum(w * b[fid] for fid, w in a.items() if fid in b)


@dataclass
class VectorizerModel:
    """Fitted hashed tf-idf model; immutable after fit, safe to share."""

    dimension: int
    idf: dict[int, float]
    doc_count: int


def _data_dir() -> Path:
    override = os.environ.get("SVLINK_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


@lru_cache(maxsize=None)
def _wordlist(path: str) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def stopwords(lang: str) -> frozenset[str]:
    return _wordlist(str(_data_dir() / f"stopwords_{lang}.txt"))


@lru_cache(maxsize=None)
def _abbreviation_list(path_en: str, path_de: str) -> tuple[str, ...]:
    entries = set(_wordlist(path_en)) | set(_wordlist(path_de))
    # longest first so "et al." wins over any shorter suffix
    return tuple(sorted(entries, key=len, reverse=True))


def _abbreviations() -> tuple[str, ...]:
    root = _data_dir()
    return _abbreviation_list(
        str(root / "abbreviations_en.txt"), str(root / "abbreviations_de.txt")
    )


def _lang_value(lang: "LanguageTag | str") -> str:
    return getattr(lang, "value", lang)


def detect_language(text: str) -> LanguageTag:
    """Pick "en" or "de" by stopword hit-ratio over whitespace tokens.

    Confident only when the winning ratio is at least 0.05 and beats the
    other language by at least 0.01; otherwise defaults to English,
    unconfident.
    """
    tokens = []
    for raw in text.lower().split():
        tok = _EDGE_STRIP_RE.sub("", raw)
        if tok:
            tokens.append(tok)
    if not tokens:
        return LanguageTag("en", confident=False)
    en, de = stopwords("en"), stopwords("de")
    ratio_en = sum(1 for t in tokens if t in en) / len(tokens)
    ratio_de = sum(1 for t in tokens if t in de) / len(tokens)
    winner, best, other = ("en", ratio_en, ratio_de)
    if ratio_de > ratio_en:
        winner, best, other = ("de", ratio_de, ratio_en)
    if best >= _MIN_HIT_RATIO and best - other >= _MIN_MARGIN:
        return LanguageTag(winner, confident=True)
    return LanguageTag("en", confident=False)


def _ends_abbreviation(text: str, dot_index: int) -> bool:
    for abbrev in _abbreviations():
        start = dot_index + 1 - len(abbrev)
        if start < 0:
            continue
        if text[start : dot_index + 1].lower() != abbrev.lower():
            continue
        if start == 0 or not text[start - 1].isalnum():
            return True
    return False


def segment_sentences(text: str) -> list[SentenceSpan]:
    """Split ``text`` into sentence spans.

    A split happens after '.', '!' or '?' followed by whitespace and then an
    uppercase letter or digit, unless the '.' closes a known abbreviation.
    Span offsets cover the whitespace-trimmed sentence content, so
    ``text[span.start:span.end] == span.text`` always holds.
    """
    if not text:
        return []
    n = len(text)
    breaks: list[int] = []
    for i, ch in enumerate(text):
        if ch not in SENTENCE_TERMINATORS:
            continue
        j = i + 1
        if j >= n or not text[j].isspace():
            continue
        while j < n and text[j].isspace():
            j += 1
        if j >= n:
            continue
        if not (text[j].isupper() or text[j].isdigit()):
            continue
        if ch == "." and _ends_abbreviation(text, i):
            continue
        breaks.append(i + 1)

    spans: list[SentenceSpan] = []
    prev = 0
    for bound in breaks + [n]:
        raw = text[prev:bound]
        start = prev + (len(raw) - len(raw.lstrip()))
        end = bound - (len(raw) - len(raw.rstrip()))
        if start < end:
            spans.append(
                SentenceSpan(index=len(spans), start=start, end=end, text=text[start:end])
            )
        prev = bound
    return spans


def word_tokens(text: str) -> list[str]:
    """Lowercased letter/digit-run tokens, stopwords included."""
    return [m.group().lower() for m in _TOKEN_RE.finditer(text)]


def token_matches(text: str) -> Iterator[tuple[int, int, str]]:
    """Yield (start, end, lowercased token) for every letter/digit run."""
    for m in _TOKEN_RE.finditer(text):
        yield m.start(), m.end(), m.group().lower()


def tokenize(text: str, lang: "LanguageTag | str" = "en") -> list[str]:
    """Lowercased tokens with the language's stopwords removed."""
    stop = stopwords(_lang_value(lang))
    return [t for t in word_tokens(text) if t not in stop]


@lru_cache(maxsize=1 << 20)
def feature_id(feature: str) -> int:
    return fnv1a64(feature.encode("utf-8")) & (HASH_DIMENSION - 1)


def _feature_counts(text: str, lang: "LanguageTag | str") -> Counter[int]:
    counts: Counter[int] = Counter()
    for token in tokenize(text, lang):
        counts[feature_id("w=" + token)] += 1
    lowered = text.lower()
    for size in NGRAM_SIZES:
        for i in range(len(lowered) - size + 1):
            counts[feature_id("c=" + lowered[i : i + size])] += 1
    return counts


def fit_vectorizer(documents: Iterable[tuple[str, "LanguageTag | str"]]) -> VectorizerModel:
    """Fit idf weights over ``documents`` (text, language) pairs.

    Document frequency counts presence, not term frequency, so the model is
    independent of document order: idf(t) = ln((N + 1) / (df(t) + 1)) + 1.
    """
    docs = list(documents)
    if not docs:
        raise EmptyCorpus("cannot fit a vectorizer on an empty corpus")
    df: Counter[int] = Counter()
    for text, lang in docs:
        df.update(_feature_counts(text, lang).keys())
    n = len(docs)
    idf = {fid: math.log((n + 1) / (seen + 1)) + 1.0 for fid, seen in df.items()}
    return VectorizerModel(dimension=HASH_DIMENSION, idf=idf, doc_count=n)


def embed(text: str, lang: "LanguageTag | str", model: VectorizerModel) -> TermVector:
    """L2-normalized tf-idf vector; tf(t) = 1 + ln(count), unseen idf = 1."""
    counts = _feature_counts(text, lang)
    if not counts:
        return TermVector()
    weights = {
        fid: (1.0 + math.log(c)) * model.idf.get(fid, 1.0) for fid, c in counts.items()
    }
    norm = math.sqrt(sum(w * w for w in weights.values()))
    entries = {fid: w / norm for fid, w in weights.items()}
    return TermVector(entries=entries, norm=1.0)


def cosine(a: TermVector, b: TermVector) -> float:
    """Cosine similarity in [0, 1]; 0.0 when either vector is empty."""
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    return a.dot(b) / (a.norm * b.norm)
