"""End-to-end orchestration: corpus in, searchable index out.

Fits one shared vectorizer over publication and variable texts (retrieval
compares sentence vectors against variable vectors, so both must live in
the same feature space), then processes publications independently — each
gets its summaries and sentence-variable links regardless of what happens
to the others — and merges results into the index in sorted id order so
the final state never depends on worker scheduling.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .corpus import CorpusBundle, Publication, ValidationReport, content_hash, validate_links, variable_text
from .searchidx import IndexedDocument, Query, SearchIndex
from .summarize import (
    BackendConfig,
    BackendError,
    CrossLingualUnavailable,
    NoSentences,
    abstractive_summary,
    extractive_summary,
)
from .svident import SvConfig, VariableBank, build_bank, identify_publication, link_record
from .textproc import VectorizerModel, detect_language, fit_vectorizer


class ValidationFailed(Exception):
    def __init__(self, report: ValidationReport):
        findings = ", ".join(
            f"{f.kind}({f.source_kind} {f.source_id} -> {f.ref})" for f in report.findings[:5]
        )
        more = "" if len(report.findings) <= 5 else f" (+{len(report.findings) - 5} more)"
        super().__init__(f"corpus failed referential validation: {findings}{more}")
        self.report = report


@dataclass
class PipelineReport:
    publications_processed: int = 0
    summaries_extractive: int = 0
    summaries_abstractive: int = 0
    summaries_fallback: int = 0
    links_emitted: int = 0
    errors: list[tuple[str, str, str]] = field(default_factory=list)
    elapsed_ms: int = 0

    def to_dict(self) -> dict:
        return {
            "publications_processed": self.publications_processed,
            "summaries_extractive": self.summaries_extractive,
            "summaries_abstractive": self.summaries_abstractive,
            "summaries_fallback": self.summaries_fallback,
            "links_emitted": self.links_emitted,
            "errors": [
                {"publication_id": pid, "stage": stage, "reason": reason}
                for pid, stage, reason in self.errors
            ],
            "elapsed_ms": self.elapsed_ms,
        }


@dataclass
class _Outcome:
    publication_id: str
    summaries: dict[str, dict]
    links: list[dict]
    errors: list[tuple[str, str]]


def fit_corpus_model(bundle: CorpusBundle) -> VectorizerModel:
    """One vectorizer over every publication text and every variable text."""
    documents = []
    for pub_id in sorted(bundle.publications):
        pub = bundle.publications[pub_id]
        documents.append((f"{pub.title}\n{pub.abstract}\n{pub.full_text}", pub.language))
    for var_id in sorted(bundle.variables):
        text = variable_text(bundle.variables[var_id])
        documents.append((text, detect_language(text)))
    return fit_vectorizer(documents)


def _process_one(
    pub: Publication,
    model: VectorizerModel,
    bank: VariableBank,
    sv_config: SvConfig,
    backend: BackendConfig,
) -> _Outcome:
    """All per-publication stages; failures recorded, never propagated."""
    summaries: dict[str, dict] = {}
    errors: list[tuple[str, str]] = []
    try:
        extractive = extractive_summary(pub, model)
        summaries[extractive.kind] = extractive.to_dict()
    except NoSentences as exc:
        errors.append(("extractive_summary", str(exc)))
    try:
        abstractive = abstractive_summary(pub, pub.language, backend, model)
        summaries[abstractive.kind] = abstractive.to_dict()
    except (NoSentences, CrossLingualUnavailable, BackendError) as exc:
        errors.append(("abstractive_summary", str(exc)))
    links = [link_record(link) for link in identify_publication(pub, bank, sv_config)]
    return _Outcome(pub.id, summaries, links, errors)


def build_document(pub: Publication, summaries: dict[str, dict], links: list[dict]) -> IndexedDocument:
    return IndexedDocument(
        publication_id=pub.id,
        title=pub.title,
        abstract=pub.abstract,
        full_text=pub.full_text,
        year=pub.year,
        language=pub.language.value,
        content_hash=content_hash(pub),
        summaries=summaries,
        links=links,
        metadata={
            "authors": list(pub.authors),
            "dataset_ids": list(pub.dataset_ids),
            "sentences": [[span.index, span.start, span.end] for span in pub.sentences],
        },
    )


def run_pipeline(bundle: CorpusBundle, config) -> tuple[PipelineReport, SearchIndex]:
    """Process every publication and build the index.

    ``config`` needs .sv, .backend, and .worker_count (a ServiceConfig).
    Publications are analyzed concurrently when worker_count > 1; results
    merge in sorted publication-id order, so state_hash is identical for
    any worker count.
    """
    started = time.monotonic()
    report = PipelineReport()
    validation = validate_links(bundle)
    if not validation.ok:
        raise ValidationFailed(validation)
    index = SearchIndex()
    if not bundle.publications:
        report.elapsed_ms = int((time.monotonic() - started) * 1000)
        return report, index

    model = fit_corpus_model(bundle)
    bank = build_bank(bundle.variables, bundle.datasets, model)
    pub_ids = sorted(bundle.publications)

    def task(pub_id: str) -> _Outcome:
        return _process_one(bundle.publications[pub_id], model, bank, config.sv, config.backend)

    if config.worker_count <= 1:
        outcomes = {pub_id: task(pub_id) for pub_id in pub_ids}
    else:
        with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
            futures = {pub_id: pool.submit(task, pub_id) for pub_id in pub_ids}
            outcomes = {pub_id: future.result() for pub_id, future in futures.items()}

    for pub_id in pub_ids:
        outcome = outcomes[pub_id]
        index.upsert(build_document(bundle.publications[pub_id], outcome.summaries, outcome.links))
        report.publications_processed += 1
        if "extractive" in outcome.summaries:
            report.summaries_extractive += 1
        if "abstractive" in outcome.summaries:
            report.summaries_abstractive += 1
        if "extractive_fallback" in outcome.summaries:
            report.summaries_fallback += 1
        report.links_emitted += len(outcome.links)
        report.errors.extend((pub_id, stage, reason) for stage, reason in outcome.errors)

    report.elapsed_ms = int((time.monotonic() - started) * 1000)
    return report, index


_SUMMARY_PREFERENCE = ("abstractive", "extractive_fallback", "extractive")


def display_summary(summaries: dict[str, dict]) -> dict | None:
    """The summary shown on result cards: most processed kind available."""
    for kind in _SUMMARY_PREFERENCE:
        if kind in summaries:
            return {"kind": kind, "text": summaries[kind]["text"]}
    return None


def search_payload(index: SearchIndex, query: Query) -> dict:
    """The /search response body; also the CLI's --json output."""
    total, hits = index.search(query)
    rendered = []
    for hit in hits:
        doc = index.get(hit.publication_id)
        rendered.append(
            {
                "publication_id": hit.publication_id,
                "score": hit.score,
                "snippet": hit.snippet,
                "variable_count": hit.variable_count,
                "year": hit.year,
                "title": doc.title if doc else "",
                "summary": display_summary(doc.summaries) if doc else None,
            }
        )
    return {"total": total, "hits": rendered}
