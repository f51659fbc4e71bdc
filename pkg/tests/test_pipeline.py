from __future__ import annotations

import dataclasses

import pytest

from svlink.config import ServiceConfig
from svlink.pipeline import (
    ValidationFailed,
    build_document,
    display_summary,
    fit_corpus_model,
    run_pipeline,
    search_payload,
)
from svlink.searchidx import Query
from svlink.summarize import BackendConfig


def _config(**kwargs) -> ServiceConfig:
    base = {"worker_count": 1}
    base.update(kwargs)
    return ServiceConfig(**base)


@pytest.fixture(scope="module")
def built(bundle):
    """Pipeline output without a backend, shared by the read-only tests."""
    return run_pipeline(bundle, _config())


def test_report_counts_no_backend(bundle, built):
    report, index = built
    assert report.publications_processed == 20
    assert report.summaries_extractive == 20
    # Same-language targets degrade to the fallback kind when no backend
    # is configured; nothing is abstractive and nothing errors.
    assert report.summaries_fallback == 20
    assert report.summaries_abstractive == 0
    assert report.links_emitted == 18
    assert report.errors == []
    assert len(index) == 20
    assert report.elapsed_ms >= 0


def test_report_counts_with_backend(bundle, backend_server):
    config = _config(backend=BackendConfig(endpoint_url=backend_server.url))
    report, index = run_pipeline(bundle, config)
    assert report.summaries_abstractive == 20
    assert report.summaries_fallback == 0
    assert report.summaries_extractive == 20
    doc = index.get("pub-001")
    assert doc.summaries["abstractive"]["text"].startswith("(en) ")
    assert doc.summaries["abstractive"]["language"] == "en"


def test_failing_backend_degrades_to_fallback(bundle, backend_server):
    config = _config(backend=BackendConfig(endpoint_url=backend_server.error_url))
    report, _ = run_pipeline(bundle, config)
    assert report.summaries_abstractive == 0
    assert report.summaries_fallback == 20
    assert report.errors == []


def test_documents_carry_analysis(bundle, built):
    _, index = built
    doc = index.get("pub-011")
    assert doc.variable_count == 2
    assert {l["variable_id"] for l in doc.links} == {"v-soc-12", "v-hlt-08"}
    assert doc.language == "en"
    spans = doc.metadata["sentences"]
    assert spans[0][0] == 0
    for idx, start, end in spans:
        assert doc.full_text[start:end].strip() == doc.full_text[start:end]
    assert doc.metadata["dataset_ids"] == ["ds-social", "ds-health"]
    assert index.get("pub-013").variable_count == 0


def test_content_hash_recorded(bundle, built):
    _, index = built
    from svlink.corpus import content_hash

    for pub_id, pub in bundle.publications.items():
        assert index.get(pub_id).content_hash == content_hash(pub)


def test_worker_counts_agree(bundle):
    hashes = {
        workers: run_pipeline(bundle, _config(worker_count=workers))[1].state_hash()
        for workers in (1, 2, 8)
    }
    assert len(set(hashes.values())) == 1


def test_repeated_runs_agree(bundle):
    first = run_pipeline(bundle, _config())[1].state_hash()
    second = run_pipeline(bundle, _config())[1].state_hash()
    assert first == second


def test_validation_failure_blocks_pipeline(bundle):
    pub = dataclasses.replace(
        bundle.publications["pub-001"], dataset_ids=["ds-social", "ds-ghost"]
    )
    broken = dataclasses.replace(
        bundle, publications={**bundle.publications, "pub-001": pub}
    )
    with pytest.raises(ValidationFailed) as exc:
        run_pipeline(broken, _config())
    assert "ds-ghost" in str(exc.value)
    assert not exc.value.report.ok


def test_empty_bundle_short_circuits():
    import dataclasses as dc

    from svlink.corpus import CorpusBundle

    report, index = run_pipeline(
        CorpusBundle(publications={}, datasets={}, variables={}), _config()
    )
    assert report.publications_processed == 0
    assert len(index) == 0
    assert dc.asdict(report)["errors"] == []


def test_publication_without_sentences_records_errors(bundle):
    empty = dataclasses.replace(
        bundle.publications["pub-001"], full_text="", sentences=[], abstract=""
    )
    patched = dataclasses.replace(
        bundle,
        publications={**bundle.publications, "pub-001": empty},
        gold_links=None,
    )
    report, index = run_pipeline(patched, _config())
    stages = {(pid, stage) for pid, stage, _ in report.errors}
    assert ("pub-001", "extractive_summary") in stages
    assert ("pub-001", "abstractive_summary") in stages
    # The document is still indexed; other publications are unaffected.
    assert index.get("pub-001") is not None
    assert report.publications_processed == 20


def test_fit_corpus_model_covers_variable_vocabulary(bundle):
    model = fit_corpus_model(bundle)
    from svlink.textproc import embed

    vec = embed("Nettoeinkommen aus Erwerbstätigkeit", "de", model)
    assert not vec.is_empty()


def test_build_document_round_trip(bundle):
    pub = bundle.publications["pub-001"]
    doc = build_document(pub, {"extractive": {"text": "s"}}, [])
    restored = type(doc).from_record(doc.to_record())
    assert restored == doc


# --- display summary and search payload --------------------------------------

def test_display_summary_preference_order():
    ext = {"extractive": {"text": "e"}}
    fall = {**ext, "extractive_fallback": {"text": "f"}}
    abst = {**fall, "abstractive": {"text": "a"}}
    assert display_summary(abst) == {"kind": "abstractive", "text": "a"}
    assert display_summary(fall) == {"kind": "extractive_fallback", "text": "f"}
    assert display_summary(ext) == {"kind": "extractive", "text": "e"}
    assert display_summary({}) is None


def test_search_payload_shape(built):
    _, index = built
    payload = search_payload(index, Query(text="trust parliament"))
    assert payload["total"] >= 1
    first = payload["hits"][0]
    assert set(first) == {
        "publication_id", "score", "snippet", "variable_count", "year", "title",
        "summary",
    }
    assert first["summary"]["kind"] == "extractive_fallback"
    assert "«" in first["snippet"]


def test_search_payload_browse_lists_everything(built):
    _, index = built
    payload = search_payload(index, Query(text="", page_size=50))
    assert payload["total"] == 20
    assert len(payload["hits"]) == 20
