"""One-sentence extractive summaries and brokered abstractive summaries.

The extractive side is self-contained: pick the sentence closest to the
centroid of all sentence vectors. The abstractive side delegates to an
external HTTP backend speaking a small JSON protocol; when the backend is
absent or down and the target language matches the document, we degrade to
a truncated extractive summary instead of failing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import requests

from .corpus import Publication
from .textproc import (
    LanguageTag,
    TermVector,
    VectorizerModel,
    cosine,
    embed,
    segment_sentences,
)

TRUNCATION_MARKER = "…"


class NoSentences(Exception):
    def __init__(self, publication_id: str):
        super().__init__(f"publication {publication_id!r} has no sentences to summarize")
        self.publication_id = publication_id


class CrossLingualUnavailable(Exception):
    def __init__(self, source_lang: str, target_lang: str):
        super().__init__(
            f"no backend configured; cannot summarize {source_lang!r} document into {target_lang!r}"
        )
        self.source_lang = source_lang
        self.target_lang = target_lang


class BackendError(Exception):
    def __init__(self, reason: str, status: int | None = None):
        super().__init__(reason)
        self.reason = reason
        self.status = status


@dataclass
class BackendConfig:
    """Connection settings for the abstractive summarization service."""

    endpoint_url: str | None = None
    timeout_ms: int = 5000
    max_summary_tokens: int = 30

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError(f"timeout_ms must be positive, got {self.timeout_ms}")


@dataclass
class Summary:
    publication_id: str
    kind: str  # extractive | abstractive | extractive_fallback
    language: LanguageTag
    text: str
    source_sentence_index: int | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "language": self.language.value,
            "text": self.text,
            "source_sentence_index": self.source_sentence_index,
        }


def _centroid(vectors: list[TermVector]) -> TermVector:
    """Mean of the vectors, re-normalized to unit length (empty stays empty)."""
    sums: dict[int, float] = {}
    for vec in vectors:
        for fid, weight in vec.entries.items():
            sums[fid] = sums.get(fid, 0.0) + weight
    if not sums:
        return TermVector()
    n = len(vectors)
    mean = {fid: total / n for fid, total in sums.items()}
    norm = math.sqrt(sum(w * w for w in mean.values()))
    return TermVector(entries={fid: w / norm for fid, w in mean.items()}, norm=1.0)


def extractive_summary(publication: Publication, model: VectorizerModel) -> Summary:
    """Select the full-text sentence closest to the document centroid.

    The centroid averages sentence vectors from the abstract plus the full
    text; only full-text sentences are candidates, so the returned index is
    always valid for ``publication.sentences``. Ties go to the smallest
    index.
    """
    if not publication.sentences:
        raise NoSentences(publication.id)
    lang = publication.language
    candidate_vecs = [embed(span.text, lang, model) for span in publication.sentences]
    abstract_vecs = [
        embed(span.text, lang, model) for span in segment_sentences(publication.abstract)
    ]
    centroid = _centroid(abstract_vecs + candidate_vecs)
    best_index = 0
    best_sim = cosine(candidate_vecs[0], centroid)
    for i in range(1, len(candidate_vecs)):
        sim = cosine(candidate_vecs[i], centroid)
        if sim > best_sim:
            best_index, best_sim = i, sim
    chosen = publication.sentences[best_index]
    return Summary(
        publication_id=publication.id,
        kind="extractive",
        language=lang,
        text=chosen.text,
        source_sentence_index=chosen.index,
    )


def truncate_tokens(text: str, max_tokens: int) -> str:
    """Whitespace-token truncation with a trailing marker when cut."""
    parts = text.split()
    if len(parts) <= max_tokens:
        return text
    return " ".join(parts[:max_tokens]) + TRUNCATION_MARKER


def _fallback(publication: Publication, backend: BackendConfig, model: VectorizerModel) -> Summary:
    base = extractive_summary(publication, model)
    return Summary(
        publication_id=publication.id,
        kind="extractive_fallback",
        language=publication.language,
        text=truncate_tokens(base.text, backend.max_summary_tokens),
        source_sentence_index=base.source_sentence_index,
    )


def abstractive_summary(
    publication: Publication,
    target_lang: "LanguageTag | str",
    backend: BackendConfig,
    model: VectorizerModel,
) -> Summary:
    """Abstractive summary via the backend, degrading per the fallback policy.

    With a reachable backend the response text is returned verbatim in the
    target language. Without one (unconfigured or failing) a same-language
    request degrades to a truncated extractive summary; a cross-lingual
    request raises CrossLingualUnavailable when no backend is configured and
    BackendError when the configured backend failed.
    """
    target = getattr(target_lang, "value", target_lang)
    source = publication.language.value
    if backend.endpoint_url is None:
        if target == source:
            return _fallback(publication, backend, model)
        raise CrossLingualUnavailable(source, target)

    payload = {
        "text": publication.abstract if publication.abstract else publication.full_text,
        "source_lang": source,
        "target_lang": target,
        "max_tokens": backend.max_summary_tokens,
    }
    failure: BackendError | None = None
    try:
        response = requests.post(
            backend.endpoint_url, json=payload, timeout=backend.timeout_ms / 1000.0
        )
        if response.status_code != 200:
            failure = BackendError(
                f"backend returned status {response.status_code}", status=response.status_code
            )
        else:
            body = response.json()
            text = body.get("summary") if isinstance(body, dict) else None
            if not isinstance(text, str) or not text:
                failure = BackendError("backend response missing 'summary'", status=200)
            else:
                return Summary(
                    publication_id=publication.id,
                    kind="abstractive",
                    language=LanguageTag(target),
                    text=text,
                )
    except (requests.RequestException, ValueError) as exc:
        failure = BackendError(f"backend unreachable: {exc}")

    if target == source:
        return _fallback(publication, backend, model)
    raise failure
