"""REST service over a processed corpus: search, detail views, reindex.

Startup prefers an existing snapshot (fast, corpus optional); without one
it runs the full pipeline and writes the snapshot. The corpus bundle, when
readable, backs the variable/dataset lookup endpoints; a service started
from snapshot alone still serves search and publication detail, and the
lookup endpoints answer 503.

Reindex is single-flight: one request rebuilds and atomically swaps the
index reference while reads keep hitting the old index; a concurrent
request gets 409.
"""
from __future__ import annotations

import threading

import uvicorn
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .config import ServiceConfig
from .corpus import CorpusBundle, CorpusError, ResearchDataset, SurveyVariable, load_corpus
from .pipeline import ValidationFailed, run_pipeline, search_payload
from .searchidx import IndexedDocument, InvalidQuery, Query, SearchIndex
from .svident import overlap_terms


class BindError(Exception):
    pass


class AppState:
    """Live service state; the index reference is swapped whole on reindex."""

    def __init__(self, config: ServiceConfig, index: SearchIndex, bundle: CorpusBundle | None):
        self.config = config
        self.index = index
        self.bundle = bundle
        self.reindex_lock = threading.Lock()


def build_state(config: ServiceConfig) -> AppState:
    bundle: CorpusBundle | None = None
    corpus_error: CorpusError | None = None
    try:
        bundle = load_corpus(config.corpus_root)
    except CorpusError as exc:
        corpus_error = exc
    if config.snapshot_path.is_file():
        index = SearchIndex.load_snapshot(config.snapshot_path)
    elif bundle is not None:
        _, index = run_pipeline(bundle, config)
        index.save_snapshot(config.snapshot_path)
    else:
        raise corpus_error if corpus_error else CorpusError("no snapshot and no corpus")
    return AppState(config, index, bundle)


def _variable_dict(variable: SurveyVariable) -> dict:
    return {
        "id": variable.id,
        "dataset_id": variable.dataset_id,
        "label": variable.label,
        "question_text": variable.question_text,
        "answer_categories": list(variable.answer_categories),
    }


def _dataset_dict(dataset: ResearchDataset) -> dict:
    return {
        "id": dataset.id,
        "title": dataset.title,
        "variable_ids": sorted(dataset.variable_ids),
    }


def _sentence_payload(doc: IndexedDocument) -> list[dict]:
    spans = doc.metadata.get("sentences", [])
    return [
        {"index": idx, "start": start, "end": end, "text": doc.full_text[start:end]}
        for idx, start, end in spans
    ]


def _aggregate_variables(doc: IndexedDocument, bundle: CorpusBundle | None) -> list[dict]:
    """Deduplicate the document's links per variable for the side panel."""
    supporting: dict[str, set[int]] = {}
    best: dict[str, float] = {}
    for link in doc.links:
        var_id = link["variable_id"]
        supporting.setdefault(var_id, set()).add(link["sentence_index"])
        best[var_id] = max(best.get(var_id, 0.0), link["similarity"])
    sentence_text = {
        entry["index"]: entry["text"] for entry in _sentence_payload(doc)
    }
    entries = []
    for var_id, indexes in supporting.items():
        variable = bundle.variables.get(var_id) if bundle else None
        terms: set[str] = set()
        if variable is not None:
            for idx in indexes:
                terms.update(overlap_terms(sentence_text.get(idx, ""), variable, doc.language))
        entries.append(
            {
                "variable_id": var_id,
                "label": variable.label if variable else "",
                "question_text": variable.question_text if variable else "",
                "answer_categories": list(variable.answer_categories) if variable else [],
                "sentence_indexes": sorted(indexes),
                "best_similarity": best[var_id],
                "overlap_terms": sorted(terms),
            }
        )
    entries.sort(key=lambda entry: (-entry["best_similarity"], entry["variable_id"]))
    return entries


def create_app(config: ServiceConfig, state: AppState | None = None) -> FastAPI:
    """Build the application; pass a prebuilt AppState to skip startup I/O."""
    if state is None:
        state = build_state(config)
    app = FastAPI(title="svlink", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.svlink = state

    def _doc_or_404(pub_id: str) -> IndexedDocument:
        doc = state.index.get(pub_id)
        if doc is None:
            raise HTTPException(status_code=404, detail=f"unknown publication {pub_id!r}")
        return doc

    def _bundle_or_503() -> CorpusBundle:
        if state.bundle is None:
            raise HTTPException(status_code=503, detail="corpus unavailable (snapshot-only mode)")
        return state.bundle

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "documents": len(state.index)}

    @app.get("/search")
    def search(
        q: str = "",
        lang: str | None = None,
        year_min: int | None = None,
        year_max: int | None = None,
        sort: str = "relevance",
        page: int = 0,
        page_size: int = 10,
    ) -> dict:
        query = Query(
            text=q,
            language=lang,
            year_min=year_min,
            year_max=year_max,
            sort=sort,
            page=page,
            page_size=page_size,
        )
        try:
            return search_payload(state.index, query)
        except InvalidQuery as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/publications/{pub_id}")
    def publication(pub_id: str) -> dict:
        doc = _doc_or_404(pub_id)
        return {
            "publication_id": doc.publication_id,
            "title": doc.title,
            "abstract": doc.abstract,
            "authors": doc.metadata.get("authors", []),
            "year": doc.year,
            "language": doc.language,
            "dataset_ids": doc.metadata.get("dataset_ids", []),
            "content_hash": doc.content_hash,
            "variable_count": doc.variable_count,
            "sentences": _sentence_payload(doc),
            "summaries": doc.summaries,
            "links": doc.links,
        }

    @app.get("/publications/{pub_id}/variables")
    def publication_variables(pub_id: str) -> list:
        doc = _doc_or_404(pub_id)
        return _aggregate_variables(doc, state.bundle)

    @app.get("/variables/{var_id}")
    def variable(var_id: str) -> dict:
        bundle = _bundle_or_503()
        record = bundle.variables.get(var_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown variable {var_id!r}")
        dataset = bundle.datasets.get(record.dataset_id)
        return {
            "variable": _variable_dict(record),
            "dataset": _dataset_dict(dataset) if dataset else None,
        }

    @app.get("/datasets/{ds_id}")
    def dataset(ds_id: str) -> dict:
        bundle = _bundle_or_503()
        record = bundle.datasets.get(ds_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown dataset {ds_id!r}")
        members = [
            _variable_dict(bundle.variables[var_id])
            for var_id in sorted(bundle.variables)
            if bundle.variables[var_id].dataset_id == ds_id
        ]
        return {"dataset": _dataset_dict(record), "variables": members}

    @app.post("/admin/reindex")
    def reindex() -> dict:
        if not state.reindex_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="reindex already running")
        try:
            try:
                bundle = load_corpus(state.config.corpus_root)
            except CorpusError as exc:
                raise HTTPException(status_code=500, detail=f"corpus unreadable: {exc}") from exc
            try:
                report, new_index = run_pipeline(bundle, state.config)
            except ValidationFailed as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            new_index.save_snapshot(state.config.snapshot_path)
            state.index = new_index
            state.bundle = bundle
            return report.to_dict()
        finally:
            state.reindex_lock.release()

    return app


def serve(config: ServiceConfig):
    """Run the service until interrupted."""
    app = create_app(config)
    host, _, port_text = config.listen_address.rpartition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text)
    except ValueError as exc:
        raise BindError(f"bad listen_address {config.listen_address!r}") from exc
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise BindError(f"cannot bind {config.listen_address}: {exc}") from exc
