"""Release gate: one test per shipped guarantee, reported line by line.

Every test here re-derives its expected answer from first principles
(brute-force scoring, exhaustive recomputation, randomized adversarial
inputs) instead of reusing library internals, so a regression in the
implementation cannot hide inside the oracle. The conftest hook prints
one PASS/FAIL line per test at the end of the run.
"""
from __future__ import annotations

import json
import math
import random
import time
from collections import Counter
from pathlib import Path

import pytest

from svlink.cli import main
from svlink.config import ServiceConfig
from svlink.corpus import Publication
from svlink.mockbackend import deterministic_summary
from svlink.pipeline import run_pipeline
from svlink.searchidx import B, FIELD_BOOSTS, FIELDS, K1, Query
from svlink.summarize import (
    BackendConfig,
    CrossLingualUnavailable,
    abstractive_summary,
    extractive_summary,
)
from svlink.svident import SvConfig, analyze_publication, build_bank, identify_publication
from svlink.textproc import LanguageTag, embed, segment_sentences, tokenize

FIXTURE_ROOT = Path(__file__).resolve().parent / "fixtures" / "corpus"


@pytest.fixture(scope="module")
def built_index(bundle):
    _, index = run_pipeline(bundle, ServiceConfig(worker_count=2))
    return index


def _query_vocabulary(index) -> list[str]:
    """Distinct indexed tokens plus words the index has never seen."""
    vocab: set[str] = set()
    for doc_id in index.document_ids():
        doc = index.get(doc_id)
        for field in FIELDS:
            vocab.update(tokenize(getattr(doc, field), doc.language))
    vocab.update(["the", "of", "und", "zzzunknown", "qqq"])
    return sorted(vocab)


# --- criterion: BM25 oracle equivalence -------------------------------------

def test_bm25_oracle_equivalence(built_index):
    started = time.perf_counter()
    docs = {doc_id: built_index.get(doc_id) for doc_id in built_index.document_ids()}
    n = len(docs)

    # Rebuild term statistics directly from the stored field texts.
    field_tokens = {
        pid: {f: tokenize(getattr(doc, f), doc.language) for f in FIELDS}
        for pid, doc in docs.items()
    }
    field_counts = {
        pid: {f: Counter(toks[f]) for f in FIELDS} for pid, toks in field_tokens.items()
    }
    avg = {f: sum(len(field_tokens[pid][f]) for pid in docs) / n for f in FIELDS}
    df: dict[str, Counter] = {f: Counter() for f in FIELDS}
    for pid in docs:
        for f in FIELDS:
            df[f].update(field_counts[pid][f].keys())

    def brute_top10(query_text: str) -> list[tuple[str, float]]:
        terms = tokenize(query_text, "en")
        if not terms:
            return [(pid, 0.0) for pid in sorted(docs)][:10]
        scored = []
        for pid in sorted(docs):
            if not any(field_counts[pid][f][t] for f in FIELDS for t in set(terms)):
                continue
            score = 0.0
            for f in FIELDS:
                dl = len(field_tokens[pid][f])
                part = 0.0
                for t in terms:
                    tf = field_counts[pid][f][t]
                    if tf == 0:
                        continue
                    dft = df[f][t]
                    idf = math.log(1.0 + (n - dft + 0.5) / (dft + 0.5))
                    part += idf * (tf * (K1 + 1.0)) / (tf + K1 * (1.0 - B + B * dl / avg[f]))
                score += FIELD_BOOSTS[f] * part
            scored.append((pid, score))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return scored[:10]

    rng = random.Random(748215)
    vocab = _query_vocabulary(built_index)
    for _ in range(200):
        words = [rng.choice(vocab) for _ in range(rng.randint(0, 4))]
        if words and rng.random() < 0.2:
            words.append(words[0])  # exercise repeated query terms
        query_text = " ".join(words)
        _, hits = built_index.search(Query(text=query_text, page_size=10))
        expected = brute_top10(query_text)
        assert [h.publication_id for h in hits] == [pid for pid, _ in expected], query_text
        for hit, (_, score) in zip(hits, expected):
            assert abs(hit.score - score) <= 1e-9, query_text
    assert time.perf_counter() - started < 10.0


# --- criterion: extractive-summary oracle -----------------------------------

def test_extractive_summary_oracle(bundle, model):
    started = time.perf_counter()
    for pub in bundle.publications.values():
        candidate_vecs = [embed(s.text, pub.language, model) for s in pub.sentences]
        abstract_vecs = [
            embed(s.text, pub.language, model) for s in segment_sentences(pub.abstract)
        ]
        pool = abstract_vecs + candidate_vecs
        acc: dict[int, float] = {}
        for vec in pool:
            for fid, weight in vec.entries.items():
                acc[fid] = acc.get(fid, 0.0) + weight
        centroid = {fid: weight / len(pool) for fid, weight in acc.items()}
        centroid_norm = math.sqrt(sum(w * w for w in centroid.values()))

        best_index, best_sim = 0, -1.0
        for i, vec in enumerate(candidate_vecs):
            if vec.norm == 0.0 or centroid_norm == 0.0:
                sim = 0.0
            else:
                dot = sum(w * centroid.get(fid, 0.0) for fid, w in vec.entries.items())
                sim = dot / (vec.norm * centroid_norm)
            if sim > best_sim:
                best_index, best_sim = i, sim

        summary = extractive_summary(pub, model)
        assert summary.source_sentence_index == best_index, pub.id
        assert summary.text == pub.sentences[best_index].text
    assert time.perf_counter() - started < 1.0


# --- criterion: dataset-filter safety fuzz ----------------------------------

FUZZ_VARIABLES = [
    ("v-a1", "ds-a", "Confidence in courts", "How much confidence do you have in the courts?"),
    ("v-a2", "ds-a", "Voting habit", "Did you vote in the most recent national election?"),
    ("v-a3", "ds-a", "Newspaper reading", "How often do you read a printed newspaper?"),
    ("v-b1", "ds-b", "Sleep quality", "How would you rate your sleep quality last month?"),
    ("v-b2", "ds-b", "Exercise frequency", "How many days per week do you exercise vigorously?"),
    ("v-b3", "ds-b", "Doctor visits", "How many times did you visit a doctor last year?"),
    ("v-c1", "ds-c", "Job security", "How secure do you feel in your current job?"),
    ("v-c2", "ds-c", "Commute length", "How many minutes does your daily commute take?"),
    ("v-c3", "ds-c", "Union membership", "Are you currently a member of a trade union?"),
]

FUZZ_FILLERS = [
    "The fieldwork ran for several months across many regions.",
    "Weights were applied to correct for unequal selection probabilities.",
    "The response rate was broadly comparable to earlier rounds.",
    "Interviews took place at the homes of the respondents.",
    "The appendix documents the coding decisions in detail.",
    "Analyses were replicated on an independent holdout sample.",
]


def test_dataset_filter_safety_fuzz(bundle, model):
    from svlink.corpus import ResearchDataset, SurveyVariable

    variables = {
        vid: SurveyVariable(
            id=vid, dataset_id=ds, label=label, question_text=question, answer_categories=[]
        )
        for vid, ds, label, question in FUZZ_VARIABLES
    }
    datasets = {
        ds: ResearchDataset(
            id=ds, title=f"Fuzz panel {ds}", variable_ids=sorted(v for v in variables if variables[v].dataset_id == ds)
        )
        for ds in ("ds-a", "ds-b", "ds-c")
    }
    bank = build_bank(variables, datasets, model)
    config = SvConfig()
    rng = random.Random(90210)
    dataset_choices = [[], ["ds-a"], ["ds-b"], ["ds-c"], ["ds-a", "ds-b"], ["ds-b", "ds-c"]]
    variable_ids = sorted(variables)

    total_links = 0
    for i in range(1000):
        for p in range(rng.randint(1, 2)):
            declared = rng.choice(dataset_choices)
            sentences = []
            for _ in range(rng.randint(2, 4)):
                if rng.random() < 0.5:
                    # Half the sentences are verbatim questions from an
                    # arbitrary dataset, declared or not.
                    sentences.append(variables[rng.choice(variable_ids)].question_text)
                else:
                    sentences.append(rng.choice(FUZZ_FILLERS))
            full_text = " ".join(sentences)
            pub = Publication(
                id=f"fuzz-{i}-{p}",
                title="Fuzz publication",
                abstract="",
                authors=["Fuzzer, A."],
                year=2020,
                language=LanguageTag("en"),
                dataset_ids=declared,
                full_text=full_text,
                sentences=segment_sentences(full_text),
            )
            links = identify_publication(pub, bank, config)
            total_links += len(links)
            for link in links:
                assert variables[link.variable_id].dataset_id in declared, (
                    f"bundle {i}: link to {link.variable_id} escapes datasets {declared}"
                )
    assert total_links > 0  # the fuzz must actually exercise the linker


# --- criterion: planted-link recovery ---------------------------------------

def test_planted_link_recovery(bundle, bank, capsys):
    started = time.perf_counter()
    config = SvConfig()
    gold = {(g.publication_id, g.sentence_index): g.variable_id for g in bundle.gold_links}
    assert len(gold) == 18

    top_match: dict[tuple[str, int], str] = {}
    for pub in bundle.publications.values():
        for link in identify_publication(pub, bank, config):
            key = (link.publication_id, link.sentence_index)
            top_match.setdefault(key, link.variable_id)  # first link per sentence is rank 1
    for key, want in gold.items():
        assert top_match.get(key) == want, f"planted pair {key} -> {want} not at rank 1"

    code = main(["eval", str(FIXTURE_ROOT)])
    out = capsys.readouterr().out
    assert code == 0
    metrics = json.loads(out)
    assert metrics["link"]["recall"] >= 0.9
    assert metrics["link"]["precision"] >= 0.8
    assert time.perf_counter() - started < 5.0


# --- criterion: idempotency and scheduling independence ----------------------

def test_idempotency_scheduling_independence(tmp_path, capsys):
    hashes = []
    snapshots = []
    for run, workers in enumerate((1, 2, 8, 8)):  # last one repeats a prior count
        snap = tmp_path / f"snapshot-{run}.json"
        code = main(
            [
                "process",
                str(FIXTURE_ROOT),
                "--snapshot-out",
                str(snap),
                "--workers",
                str(workers),
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        hashes.append(json.loads(out)["state_hash"])
        snapshots.append(snap.read_bytes())
    assert len(set(hashes)) == 1
    assert len(set(snapshots)) == 1  # the files themselves are byte-identical


# --- criterion: sort-mode contracts -----------------------------------------

def test_sort_mode_contracts(built_index):
    rng = random.Random(5151)
    vocab = _query_vocabulary(built_index)
    languages = [None, None, "en", "de"]
    for _ in range(100):
        words = [rng.choice(vocab) for _ in range(rng.randint(0, 3))]
        base = dict(
            text=" ".join(words),
            language=rng.choice(languages),
            year_min=rng.choice([None, 2000, 2010]),
            year_max=rng.choice([None, 2016, 2030]),
            page_size=50,
        )
        if base["year_min"] is not None and base["year_max"] is not None:
            base["year_min"], base["year_max"] = (
                min(base["year_min"], base["year_max"]),
                max(base["year_min"], base["year_max"]),
            )

        _, by_year = built_index.search(Query(sort="recency", **base))
        for a, b in zip(by_year, by_year[1:]):
            assert a.year >= b.year
            if a.year == b.year:
                # documented tie-break: score descending, then id ascending
                assert a.score > b.score or (
                    a.score == b.score and a.publication_id < b.publication_id
                )

        _, by_count = built_index.search(Query(sort="variable_count", **base))
        for a, b in zip(by_count, by_count[1:]):
            assert a.variable_count >= b.variable_count
            if a.variable_count == b.variable_count:
                assert a.score > b.score or (
                    a.score == b.score and a.publication_id < b.publication_id
                )


# --- criterion: fallback policy ---------------------------------------------

def test_fallback_policy(bundle, model, backend_server):
    unconfigured = BackendConfig()
    for pub in bundle.publications.values():
        same_lang = abstractive_summary(pub, pub.language, unconfigured, model)
        assert same_lang.kind == "extractive_fallback", pub.id
        other = "de" if pub.language.value == "en" else "en"
        with pytest.raises(CrossLingualUnavailable):
            abstractive_summary(pub, other, unconfigured, model)

    configured = BackendConfig(endpoint_url=backend_server.url)
    for pub in bundle.publications.values():
        for target in ("en", "de"):
            summary = abstractive_summary(pub, target, configured, model)
            assert summary.kind == "abstractive", pub.id
            payload_text = pub.abstract if pub.abstract else pub.full_text
            assert summary.text == deterministic_summary(
                payload_text, target, configured.max_summary_tokens
            )
            assert summary.language.value == target


# --- criterion: threshold monotonicity --------------------------------------

def test_threshold_monotonicity(bundle, bank):
    def counts(config: SvConfig) -> tuple[int, int]:
        positives = links = 0
        for pub in bundle.publications.values():
            classifications, pub_links = analyze_publication(pub, bank, config)
            positives += sum(1 for c in classifications if c.is_variable_sentence)
            links += len(pub_links)
        return positives, links

    sweeps = [
        ("tau_classifier", 0.5, 0.95),
        ("tau_retrieval", 0.6, 0.99),
        ("min_match_sim", 0.35, 0.9),
    ]
    for name, low, high in sweeps:
        previous = None
        for step in range(10):
            value = low + (high - low) * step / 9
            current = counts(SvConfig(**{name: value}))
            if previous is not None:
                assert current[0] <= previous[0], f"{name}={value} raised positives"
                assert current[1] <= previous[1], f"{name}={value} raised links"
            previous = current
