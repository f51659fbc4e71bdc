"""From-scratch inverted index with BM25 ranking over three weighted fields.

Documents carry title/abstract/full_text postings plus stored payload
(summaries, links, metadata). Scoring is field-level BM25 (k1=1.2, b=0.75)
summed with boosts title 2.0 / abstract 1.5 / full_text 1.0:

    score(d) = sum_f boost_f * sum_t idf(t,f) * tf*(k1+1) / (tf + k1*(1 - b + b*len_f(d)/avg_f))

with idf(t,f) = ln(1 + (N - df + 0.5)/(df + 0.5)), N the total document
count and df the field-level document frequency. Accumulation order is
canonical — fields in declaration order, then query tokens in query order
(with multiplicity) — so independent scorers can reproduce sums bit for bit.

Queries tokenize through the English stopword list regardless of document
language. A query with no effective tokens is browse mode: every filtered
document is a zero-score hit, ordered by the active sort mode. Otherwise
only documents containing at least one query token are hits.

Concurrency: one coarse lock serializes writes against reads, so a search
always sees pre- or post-upsert state, never a partial update.
"""
from __future__ import annotations

import json
import math
import os
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .hashing import fnv1a64_hex
from .textproc import token_matches, tokenize

K1 = 1.2
B = 0.75
FIELDS = ("title", "abstract", "full_text")
FIELD_BOOSTS = {"title": 2.0, "abstract": 1.5, "full_text": 1.0}
SORT_MODES = ("relevance", "recency", "variable_count")
SNIPPET_WINDOW = 160
MARK_OPEN = "«"
MARK_CLOSE = "»"
SNAPSHOT_FORMAT = "svlink-index-v1"


class InvalidQuery(ValueError):
    pass


class SnapshotCorrupt(Exception):
    def __init__(self, path: "Path | str", reason: str):
        super().__init__(f"snapshot {path}: {reason}")
        self.path = str(path)
        self.reason = reason


@dataclass
class IndexedDocument:
    """One publication's searchable fields plus stored analysis payload.

    variable_count is derived from the stored links (distinct variable ids)
    and recomputed on construction, so it can never drift from them.
    """

    publication_id: str
    title: str
    abstract: str
    full_text: str
    year: int
    language: str
    content_hash: str
    summaries: dict[str, dict] = field(default_factory=dict)
    links: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    variable_count: int = field(init=False, default=0)

    def __post_init__(self):
        self.variable_count = len({link["variable_id"] for link in self.links})

    def to_record(self) -> dict:
        return {
            "publication_id": self.publication_id,
            "title": self.title,
            "abstract": self.abstract,
            "full_text": self.full_text,
            "year": self.year,
            "language": self.language,
            "content_hash": self.content_hash,
            "summaries": self.summaries,
            "links": self.links,
            "metadata": self.metadata,
        }

    @classmethod
    def from_record(cls, record: dict) -> "IndexedDocument":
        return cls(
            publication_id=record["publication_id"],
            title=record["title"],
            abstract=record["abstract"],
            full_text=record["full_text"],
            year=record["year"],
            language=record["language"],
            content_hash=record["content_hash"],
            summaries=record.get("summaries", {}),
            links=record.get("links", []),
            metadata=record.get("metadata", {}),
        )


@dataclass
class Query:
    text: str = ""
    language: str | None = None
    year_min: int | None = None
    year_max: int | None = None
    sort: str = "relevance"
    page: int = 0
    page_size: int = 10


@dataclass
class SearchHit:
    publication_id: str
    score: float
    snippet: str
    variable_count: int
    year: int


def snippet(doc: IndexedDocument, query_terms: Sequence[str], window: int = SNIPPET_WINDOW) -> str:
    """Window of full_text with the most distinct query terms, terms marked.

    Candidate windows start at 0 or flush against a term occurrence's right
    edge; the earliest window with the maximal distinct-term count wins,
    which is also the earliest maximizing position overall. Occurrences
    fully inside the window are wrapped in markers; a term cut by the
    window edge is left unmarked so markers stay balanced. With no match
    the leading prefix is returned unmarked.
    """
    text = doc.full_text
    terms = {t.lower() for t in query_terms if t}
    if not terms or not text:
        return text[:window]
    matches = [(s, e, tok) for s, e, tok in token_matches(text) if tok in terms]
    if not matches:
        return text[:window]
    starts = sorted({0} | {max(0, e - window) for _, e, _ in matches})
    best_start, best_count = 0, -1
    for s in starts:
        end = s + window
        count = len({tok for ms, me, tok in matches if ms >= s and me <= end})
        if count > best_count:
            best_start, best_count = s, count
    lo, hi = best_start, min(best_start + window, len(text))
    parts: list[str] = []
    pos = lo
    for ms, me, _ in matches:
        if ms < lo or me > hi:
            continue
        parts.extend((text[pos:ms], MARK_OPEN, text[ms:me], MARK_CLOSE))
        pos = me
    parts.append(text[pos:hi])
    return "".join(parts)


class SearchIndex:
    def __init__(self):
        self._docs: dict[str, IndexedDocument] = {}
        # field -> term -> {doc_id: term frequency}
        self._postings: dict[str, dict[str, dict[str, int]]] = {f: {} for f in FIELDS}
        # field -> doc_id -> token count
        self._lengths: dict[str, dict[str, int]] = {f: {} for f in FIELDS}
        self._lock = threading.RLock()

    def __len__(self) -> int:
        return len(self._docs)

    def document_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._docs)

    def get(self, doc_id: str) -> IndexedDocument | None:
        with self._lock:
            return self._docs.get(doc_id)

    def upsert(self, doc: IndexedDocument):
        """Replace all postings for this publication id atomically."""
        with self._lock:
            self._remove(doc.publication_id)
            self._docs[doc.publication_id] = doc
            for f in FIELDS:
                tokens = tokenize(getattr(doc, f), doc.language)
                self._lengths[f][doc.publication_id] = len(tokens)
                for token, tf in Counter(tokens).items():
                    self._postings[f].setdefault(token, {})[doc.publication_id] = tf

    def _remove(self, doc_id: str):
        old = self._docs.pop(doc_id, None)
        if old is None:
            return
        for f in FIELDS:
            self._lengths[f].pop(doc_id, None)
            for token in set(tokenize(getattr(old, f), old.language)):
                entry = self._postings[f].get(token)
                if entry is None:
                    continue
                entry.pop(doc_id, None)
                if not entry:
                    del self._postings[f][token]

    def _passes(self, doc: IndexedDocument, q: Query) -> bool:
        if q.language is not None and doc.language != q.language:
            return False
        if q.year_min is not None and doc.year < q.year_min:
            return False
        if q.year_max is not None and doc.year > q.year_max:
            return False
        return True

    def _avg_lengths(self) -> dict[str, float]:
        n = len(self._docs)
        if n == 0:
            return {f: 0.0 for f in FIELDS}
        return {f: sum(self._lengths[f].values()) / n for f in FIELDS}

    def _score_doc(self, doc_id: str, terms: Sequence[str], avg: dict[str, float]) -> float:
        n = len(self._docs)
        score = 0.0
        for f in FIELDS:
            dl = self._lengths[f].get(doc_id, 0)
            part = 0.0
            for t in terms:
                entry = self._postings[f].get(t)
                if not entry:
                    continue
                tf = entry.get(doc_id, 0)
                if tf == 0:
                    continue
                df = len(entry)
                idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
                part += idf * (tf * (K1 + 1.0)) / (tf + K1 * (1.0 - B + B * dl / avg[f]))
            score += FIELD_BOOSTS[f] * part
        return score

    @staticmethod
    def _sort_key(doc: IndexedDocument, score: float, sort: str):
        if sort == "recency":
            return (-doc.year, -score, doc.publication_id)
        if sort == "variable_count":
            return (-doc.variable_count, -score, doc.publication_id)
        return (-score, doc.publication_id)

    def _validate(self, q: Query):
        if q.sort not in SORT_MODES:
            raise InvalidQuery(f"unknown sort mode {q.sort!r}")
        if q.year_min is not None and q.year_max is not None and q.year_min > q.year_max:
            raise InvalidQuery(f"year_min {q.year_min} > year_max {q.year_max}")
        if q.page < 0:
            raise InvalidQuery(f"page must be >= 0, got {q.page}")
        if q.page_size < 1:
            raise InvalidQuery(f"page_size must be >= 1, got {q.page_size}")

    def search(self, q: Query) -> tuple[int, list[SearchHit]]:
        """Filtered, ranked, paged search; returns (total matches, page hits)."""
        self._validate(q)
        terms = tokenize(q.text, "en")
        with self._lock:
            filtered = [
                doc_id for doc_id in sorted(self._docs) if self._passes(self._docs[doc_id], q)
            ]
            if not terms:
                scored = [(doc_id, 0.0) for doc_id in filtered]
            else:
                candidates: set[str] = set()
                for f in FIELDS:
                    for t in set(terms):
                        candidates.update(self._postings[f].get(t, ()))
                avg = self._avg_lengths()
                scored = [
                    (doc_id, self._score_doc(doc_id, terms, avg))
                    for doc_id in sorted(candidates.intersection(filtered))
                ]
            scored.sort(key=lambda pair: self._sort_key(self._docs[pair[0]], pair[1], q.sort))
            total = len(scored)
            start = q.page * q.page_size
            page = scored[start : start + q.page_size]
            unique_terms = list(dict.fromkeys(terms))
            hits = []
            for doc_id, score in page:
                doc = self._docs[doc_id]
                hits.append(
                    SearchHit(
                        publication_id=doc_id,
                        score=score,
                        snippet=snippet(doc, unique_terms),
                        variable_count=doc.variable_count,
                        year=doc.year,
                    )
                )
            return total, hits

    def _state_payload(self) -> dict:
        return {
            "docs": {doc_id: doc.to_record() for doc_id, doc in self._docs.items()},
            "field_lengths": self._lengths,
            "postings": self._postings,
        }

    def state_hash(self) -> str:
        """Hash of the canonical serialization of docs plus postings."""
        with self._lock:
            data = json.dumps(self._state_payload(), sort_keys=True, ensure_ascii=False)
        return fnv1a64_hex(data.encode("utf-8"))

    def save_snapshot(self, path: "Path | str"):
        """Write the index as one canonical JSON document, atomically."""
        path = Path(path)
        with self._lock:
            payload = {"format": SNAPSHOT_FORMAT, **self._state_payload()}
        data = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(data, encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load_snapshot(cls, path: "Path | str") -> "SearchIndex":
        """Rebuild an index from a snapshot.

        Postings are re-derived from the stored documents (tokenization is
        deterministic), so a round-tripped index hashes identically to the
        original. Unreadable files surface as OSError; anything structurally
        wrong raises SnapshotCorrupt.
        """
        raw = Path(path).read_text(encoding="utf-8")
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SnapshotCorrupt(path, f"not valid JSON ({exc})") from exc
        if not isinstance(payload, dict) or payload.get("format") != SNAPSHOT_FORMAT:
            raise SnapshotCorrupt(path, f"unknown format {payload.get('format')!r}"
                                  if isinstance(payload, dict) else "top level is not an object")
        docs = payload.get("docs")
        if not isinstance(docs, dict):
            raise SnapshotCorrupt(path, "missing docs table")
        index = cls()
        for doc_id in sorted(docs):
            try:
                doc = IndexedDocument.from_record(docs[doc_id])
            except (KeyError, TypeError) as exc:
                raise SnapshotCorrupt(path, f"document {doc_id!r}: {exc}") from exc
            if doc.publication_id != doc_id:
                raise SnapshotCorrupt(path, f"document {doc_id!r} has mismatched id")
            index.upsert(doc)
        return index
