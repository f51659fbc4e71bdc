"""Detection of variable-defining sentences and matching against survey
variables from the datasets a publication declares.

Two signals form a disjunctive ensemble per sentence: a fixed-weight
logistic classifier over interpretable surface features, and a lexical
retriever that scores the sentence vector against candidate variable
vectors. A sentence is positive when either signal clears its threshold;
candidate variables are always restricted to the publication's declared
datasets before any scoring happens.

Both components sit behind small replaceable surfaces (``SvConfig`` weights
for the classifier, ``VectorizerModel`` for the retriever) so trained models
can be substituted without touching callers.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Publication, ResearchDataset, SurveyVariable, variable_text
from .textproc import (
    LanguageTag,
    SentenceSpan,
    TermVector,
    VectorizerModel,
    cosine,
    detect_language,
    embed,
    tokenize,
    word_tokens,
)

CUE_TERMS = {
    "en": frozenset({
        "measure", "measured", "measurement", "variable", "item", "items", "scale",
        "question", "questionnaire", "respondents", "asked", "survey", "indicator",
    }),
    "de": frozenset({
        "gemessen", "variable", "skala", "frage", "befragten", "erhoben",
        "indikator", "fragebogen",
    }),
}

DEFAULT_WEIGHTS = {
    "cue_terms": 0.9,
    "contains_digit": 0.3,
    "token_count_band": 0.4,
    "question_mark": 0.5,
}

TOKEN_BAND = (8, 60)


class UnknownDataset(Exception):
    def __init__(self, variable_id: str, dataset_id: str):
        super().__init__(f"variable {variable_id!r} references unknown dataset {dataset_id!r}")
        self.variable_id = variable_id
        self.dataset_id = dataset_id


@dataclass
class SvConfig:
    """Thresholds and classifier parameters for sentence identification."""

    tau_classifier: float = 0.5
    tau_retrieval: float = 0.6
    top_k: int = 5
    min_match_sim: float = 0.35
    weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    bias: float = -2.0

    def __post_init__(self):
        for name, value in (
            ("tau_classifier", self.tau_classifier),
            ("tau_retrieval", self.tau_retrieval),
            ("min_match_sim", self.min_match_sim),
        ):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass
class VariableBank:
    """All survey variables with precomputed vectors, grouped by dataset."""

    variables: dict[str, SurveyVariable]
    vectors: dict[str, TermVector]
    by_dataset: dict[str, list[str]]
    model: VectorizerModel


@dataclass
class SentenceClassification:
    sentence_index: int
    classifier_score: float
    retrieval_score: float
    is_variable_sentence: bool
    final_score: float


@dataclass
class VariableMatch:
    variable_id: str
    similarity: float
    rank: int


@dataclass(frozen=True)
class SentenceVariableLink:
    publication_id: str
    sentence_index: int
    variable_id: str
    similarity: float
    classifier_score: float
    method: str = "ensemble"


def build_bank(
    variables: dict[str, SurveyVariable],
    datasets: dict[str, ResearchDataset],
    model: VectorizerModel,
) -> VariableBank:
    """Embed every variable's joined text and group variable ids by dataset.

    Variable records carry no language; each vector is embedded under the
    detected language of its own text.
    """
    vectors: dict[str, TermVector] = {}
    by_dataset: dict[str, list[str]] = {}
    for var_id in sorted(variables):
        variable = variables[var_id]
        if variable.dataset_id not in datasets:
            raise UnknownDataset(var_id, variable.dataset_id)
        text = variable_text(variable)
        vectors[var_id] = embed(text, detect_language(text), model)
        by_dataset.setdefault(variable.dataset_id, []).append(var_id)
    return VariableBank(
        variables=dict(variables), vectors=vectors, by_dataset=by_dataset, model=model
    )


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def classifier_score(
    sentence_text: str, lang: "LanguageTag | str", config: SvConfig
) -> float:
    """Logistic score over surface features of one sentence.

    Features: number of cue-term token occurrences for the language, a
    contains-digit flag, a token-count-in-[8,60] flag, and a question-mark
    flag. With all features inactive the score is sigmoid(bias).
    """
    lang_value = getattr(lang, "value", lang)
    cues = CUE_TERMS.get(lang_value, CUE_TERMS["en"])
    tokens = word_tokens(sentence_text)
    cue_count = sum(1 for tok in tokens if tok in cues)
    has_digit = 1.0 if any(ch.isdigit() for ch in sentence_text) else 0.0
    in_band = 1.0 if TOKEN_BAND[0] <= len(tokens) <= TOKEN_BAND[1] else 0.0
    has_question = 1.0 if "?" in sentence_text else 0.0
    w = config.weights
    activation = (
        w["cue_terms"] * cue_count
        + w["contains_digit"] * has_digit
        + w["token_count_band"] * in_band
        + w["question_mark"] * has_question
        + config.bias
    )
    return _sigmoid(activation)


def retrieval_score(
    sentence_vec: TermVector, bank: VariableBank, candidate_ids: Iterable[str]
) -> tuple[str | None, float]:
    """Best cosine over the candidate variables.

    Ties go to the lexicographically smallest variable id; no candidates
    means (None, 0.0).
    """
    best_id: str | None = None
    best_sim = 0.0
    for var_id in sorted(candidate_ids):
        sim = cosine(sentence_vec, bank.vectors[var_id])
        if best_id is None or sim > best_sim:
            best_id, best_sim = var_id, sim
    if best_id is None:
        return None, 0.0
    return best_id, best_sim


def classify_sentence(
    span: SentenceSpan,
    lang: "LanguageTag | str",
    bank: VariableBank,
    candidate_ids: Sequence[str],
    config: SvConfig,
    sentence_vec: TermVector | None = None,
) -> SentenceClassification:
    """Score one sentence with both ensemble components.

    Positive iff the classifier clears tau_classifier or the retriever
    clears tau_retrieval; final_score is the max of the two.
    """
    if sentence_vec is None:
        sentence_vec = embed(span.text, lang, bank.model)
    c_score = classifier_score(span.text, lang, config)
    _, r_score = retrieval_score(sentence_vec, bank, candidate_ids)
    return SentenceClassification(
        sentence_index=span.index,
        classifier_score=c_score,
        retrieval_score=r_score,
        is_variable_sentence=(c_score >= config.tau_classifier or r_score >= config.tau_retrieval),
        final_score=max(c_score, r_score),
    )


def candidate_ids_for(bank: VariableBank, dataset_ids: Iterable[str]) -> list[str]:
    """Sorted union of the variable ids in the given datasets."""
    out: set[str] = set()
    for ds_id in dataset_ids:
        out.update(bank.by_dataset.get(ds_id, ()))
    return sorted(out)


def match_variables(
    sentence_vec: TermVector,
    bank: VariableBank,
    allowed_dataset_ids: Iterable[str],
    config: SvConfig,
) -> list[VariableMatch]:
    """Ranked candidate variables for one sentence.

    Candidates come only from the allowed datasets; similarities below
    min_match_sim are dropped, the rest sorted by similarity (ties by id)
    and truncated to top_k with ranks 1..n.
    """
    candidates = candidate_ids_for(bank, allowed_dataset_ids)
    scored = [
        (var_id, cosine(sentence_vec, bank.vectors[var_id])) for var_id in candidates
    ]
    kept = [(var_id, sim) for var_id, sim in scored if sim >= config.min_match_sim]
    kept.sort(key=lambda pair: (-pair[1], pair[0]))
    return [
        VariableMatch(variable_id=var_id, similarity=sim, rank=rank)
        for rank, (var_id, sim) in enumerate(kept[: config.top_k], start=1)
    ]


def analyze_publication(
    publication: Publication, bank: VariableBank, config: SvConfig
) -> tuple[list[SentenceClassification], list[SentenceVariableLink]]:
    """Classify every sentence and emit links for the positive ones.

    Links are ordered by (sentence_index, rank) and always respect the
    publication's dataset filter because candidates never leave it.
    """
    allowed = publication.dataset_ids
    candidates = candidate_ids_for(bank, allowed)
    classifications: list[SentenceClassification] = []
    links: list[SentenceVariableLink] = []
    for span in publication.sentences:
        vec = embed(span.text, publication.language, bank.model)
        cls = classify_sentence(
            span, publication.language, bank, candidates, config, sentence_vec=vec
        )
        classifications.append(cls)
        if not cls.is_variable_sentence:
            continue
        for match in match_variables(vec, bank, allowed, config):
            links.append(
                SentenceVariableLink(
                    publication_id=publication.id,
                    sentence_index=span.index,
                    variable_id=match.variable_id,
                    similarity=match.similarity,
                    classifier_score=cls.classifier_score,
                )
            )
    return classifications, links


def identify_publication(
    publication: Publication, bank: VariableBank, config: SvConfig
) -> list[SentenceVariableLink]:
    """Links for all positive sentences of one publication."""
    _, links = analyze_publication(publication, bank, config)
    return links


def overlap_terms(
    sentence_text: str, variable: SurveyVariable, lang: "LanguageTag | str"
) -> list[str]:
    """Sorted content words shared by the sentence and the variable.

    The variable side covers label and question text; stopwords are already
    excluded by tokenization.
    """
    sentence_terms = set(tokenize(sentence_text, lang))
    variable_terms = set(tokenize(f"{variable.label} {variable.question_text}", lang))
    return sorted(sentence_terms & variable_terms)


def link_record(link: SentenceVariableLink) -> dict:
    return {
        "publication_id": link.publication_id,
        "sentence_index": link.sentence_index,
        "variable_id": link.variable_id,
        "similarity": link.similarity,
        "classifier_score": link.classifier_score,
        "method": link.method,
    }


def links_to_jsonl(links: Iterable[SentenceVariableLink]) -> str:
    """Serialize links in the pipeline handoff format, one object per line."""
    return "".join(
        json.dumps(link_record(link), ensure_ascii=False, sort_keys=True) + "\n"
        for link in links
    )
