"""Scores predicted sentence-variable links against gold annotations.

Two granularities: sentence level (did we flag the right sentences?) and
link level (did we attach the right variable to the right sentence?). A
predicted link counts as true positive only on exact
(publication, sentence_index, variable_id) match.
"""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import CorpusBundle
from .pipeline import fit_corpus_model
from .svident import SvConfig, analyze_publication, build_bank


class GoldMissing(Exception):
    pass


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 0.0 if precision + recall == 0.0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


@dataclass
class EvalResult:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    link_tp: int
    link_fp: int
    link_fn: int
    link_precision: float
    link_recall: float
    link_f1: float

    def to_dict(self) -> dict:
        return {
            "sentence": {
                "tp": self.tp,
                "fp": self.fp,
                "fn": self.fn,
                "precision": self.precision,
                "recall": self.recall,
                "f1": self.f1,
            },
            "link": {
                "tp": self.link_tp,
                "fp": self.link_fp,
                "fn": self.link_fn,
                "precision": self.link_precision,
                "recall": self.link_recall,
                "f1": self.link_f1,
            },
        }


def evaluate_bundle(bundle: CorpusBundle, sv_config: SvConfig | None = None) -> EvalResult:
    """Run identification over the bundle and compare to its gold links."""
    if bundle.gold_links is None:
        raise GoldMissing("bundle has no gold links")
    sv_config = sv_config or SvConfig()
    model = fit_corpus_model(bundle)
    bank = build_bank(bundle.variables, bundle.datasets, model)

    pred_sentences: set[tuple[str, int]] = set()
    pred_links: set[tuple[str, int, str]] = set()
    for pub_id in sorted(bundle.publications):
        classifications, links = analyze_publication(bundle.publications[pub_id], bank, sv_config)
        pred_sentences.update(
            (pub_id, c.sentence_index) for c in classifications if c.is_variable_sentence
        )
        pred_links.update((pub_id, link.sentence_index, link.variable_id) for link in links)

    gold_links = {
        (g.publication_id, g.sentence_index, g.variable_id) for g in bundle.gold_links
    }
    gold_sentences = {(pub_id, idx) for pub_id, idx, _ in gold_links}

    tp = len(pred_sentences & gold_sentences)
    fp = len(pred_sentences - gold_sentences)
    fn = len(gold_sentences - pred_sentences)
    precision, recall, f1 = _prf(tp, fp, fn)

    link_tp = len(pred_links & gold_links)
    link_fp = len(pred_links - gold_links)
    link_fn = len(gold_links - pred_links)
    link_precision, link_recall, link_f1 = _prf(link_tp, link_fp, link_fn)

    return EvalResult(
        tp=tp, fp=fp, fn=fn, precision=precision, recall=recall, f1=f1,
        link_tp=link_tp, link_fp=link_fp, link_fn=link_fn,
        link_precision=link_precision, link_recall=link_recall, link_f1=link_f1,
    )
