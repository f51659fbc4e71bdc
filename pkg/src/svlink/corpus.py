"""Domain data model and corpus bundle loading/validation.

The corpus is ingested from JSONL files (UTF-8, one object per line):
``publications.jsonl``, ``datasets.jsonl``, ``variables.jsonl`` and an
optional ``gold_links.jsonl`` with human-annotated sentence-to-variable
links for evaluation. ``full_text`` arrives pre-extracted; sentence spans
are computed at load time and never serialized.

Unknown JSON fields are ignored for forward compatibility. A loaded
``CorpusBundle`` is immutable by convention and safe to share across
threads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .hashing import fnv1a64_hex
from .textproc import LanguageTag, SentenceSpan, segment_sentences

__all__ = [
    "Publication",
    "ResearchDataset",
    "SurveyVariable",
    "SentenceSpan",
    "GoldLink",
    "CorpusBundle",
    "Finding",
    "ValidationReport",
    "CorpusError",
    "MissingFile",
    "MalformedRecord",
    "DuplicateId",
    "load_corpus",
    "save_corpus",
    "validate_links",
    "content_hash",
    "variable_text",
]

YEAR_MIN = 1900
YEAR_MAX = 2100
LANGUAGES = ("en", "de")


class CorpusError(Exception):
    """Base class for corpus ingest failures."""


class MissingFile(CorpusError):
    def __init__(self, path: Path):
        super().__init__(f"required corpus file missing: {path}")
        self.path = path


class MalformedRecord(CorpusError):
    def __init__(self, filename: str, line: int, reason: str):
        super().__init__(f"{filename}:{line}: {reason}")
        self.filename = filename
        self.line = line
        self.reason = reason


class DuplicateId(CorpusError):
    def __init__(self, filename: str, line: int, record_id: str):
        super().__init__(f"{filename}:{line}: duplicate id {record_id!r}")
        self.filename = filename
        self.line = line
        self.record_id = record_id


@dataclass
class Publication:
    id: str
    title: str
    abstract: str
    authors: list[str]
    year: int
    language: LanguageTag
    dataset_ids: list[str]
    full_text: str
    sentences: list[SentenceSpan] = field(default_factory=list)


@dataclass
class ResearchDataset:
    id: str
    title: str
    variable_ids: list[str]


@dataclass
class SurveyVariable:
    id: str
    dataset_id: str
    label: str
    question_text: str
    answer_categories: list[str]


@dataclass(frozen=True)
class GoldLink:
    publication_id: str
    sentence_index: int
    variable_id: str


@dataclass
class CorpusBundle:
    publications: dict[str, Publication]
    datasets: dict[str, ResearchDataset]
    variables: dict[str, SurveyVariable]
    gold_links: list[GoldLink] | None = None


@dataclass(frozen=True)
class Finding:
    """One dangling reference discovered by validate_links()."""

    kind: str  # missing_dataset | missing_variable | missing_publication | bad_sentence_index
    source_kind: str  # publication | dataset | variable | gold_link
    source_id: str
    ref: str


@dataclass
class ValidationReport:
    findings: list[Finding]

    @property
    def ok(self) -> bool:
        return not self.findings


def variable_text(variable: SurveyVariable) -> str:
    """Label, question text, and answer categories joined with spaces."""
    parts = [variable.label, variable.question_text, *variable.answer_categories]
    return " ".join(p for p in parts if p)


def _require(record: dict, key: str, kind: type, filename: str, line: int) -> Any:
    if key not in record:
        raise MalformedRecord(filename, line, f"missing field {key!r}")
    value = record[key]
    if kind is int and isinstance(value, bool):
        raise MalformedRecord(filename, line, f"field {key!r} must be an integer")
    if not isinstance(value, kind):
        raise MalformedRecord(filename, line, f"field {key!r} has wrong type")
    return value


def _string_list(record: dict, key: str, filename: str, line: int) -> list[str]:
    value = record.get(key, [])
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise MalformedRecord(filename, line, f"field {key!r} must be a list of strings")
    return list(value)


def _parse_publication(record: dict, filename: str, line: int) -> Publication:
    pub_id = _require(record, "id", str, filename, line)
    if not pub_id:
        raise MalformedRecord(filename, line, "field 'id' must be nonempty")
    year = _require(record, "year", int, filename, line)
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise MalformedRecord(filename, line, f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")
    lang = _require(record, "lang", str, filename, line)
    if lang not in LANGUAGES:
        raise MalformedRecord(filename, line, f"lang must be one of {LANGUAGES}")
    full_text = str(record.get("full_text", ""))
    return Publication(
        id=pub_id,
        title=str(record.get("title", "")),
        abstract=str(record.get("abstract", "")),
        authors=_string_list(record, "authors", filename, line),
        year=year,
        language=LanguageTag(lang, confident=True),
        dataset_ids=_string_list(record, "dataset_ids", filename, line),
        full_text=full_text,
        sentences=segment_sentences(full_text),
    )


def _parse_dataset(record: dict, filename: str, line: int) -> ResearchDataset:
    ds_id = _require(record, "id", str, filename, line)
    if not ds_id:
        raise MalformedRecord(filename, line, "field 'id' must be nonempty")
    return ResearchDataset(
        id=ds_id,
        title=str(record.get("title", "")),
        variable_ids=_string_list(record, "variable_ids", filename, line),
    )


def _parse_variable(record: dict, filename: str, line: int) -> SurveyVariable:
    var_id = _require(record, "id", str, filename, line)
    if not var_id:
        raise MalformedRecord(filename, line, "field 'id' must be nonempty")
    dataset_id = _require(record, "dataset_id", str, filename, line)
    if not dataset_id:
        raise MalformedRecord(filename, line, "field 'dataset_id' must be nonempty")
    label = str(record.get("label", ""))
    question_text = str(record.get("question_text", ""))
    if not label and not question_text:
        raise MalformedRecord(filename, line, "label and question_text both empty")
    return SurveyVariable(
        id=var_id,
        dataset_id=dataset_id,
        label=label,
        question_text=question_text,
        answer_categories=_string_list(record, "answer_categories", filename, line),
    )


def _parse_gold_link(record: dict, filename: str, line: int) -> GoldLink:
    sentence_index = _require(record, "sentence_index", int, filename, line)
    if sentence_index < 0:
        raise MalformedRecord(filename, line, "sentence_index must be >= 0")
    return GoldLink(
        publication_id=_require(record, "publication_id", str, filename, line),
        sentence_index=sentence_index,
        variable_id=_require(record, "variable_id", str, filename, line),
    )


def _read_jsonl(path: Path, parse: Callable[[dict, str, int], Any]) -> list[Any]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(path.name, line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise MalformedRecord(path.name, line_no, "line is not a JSON object")
            records.append((line_no, parse(obj, path.name, line_no)))
    return records


def _keyed(records: list[tuple[int, Any]], filename: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for line_no, record in records:
        if record.id in out:
            raise DuplicateId(filename, line_no, record.id)
        out[record.id] = record
    return out


def load_corpus(root_path: "Path | str") -> CorpusBundle:
    """Load and parse a corpus bundle from ``root_path``.

    Requires publications.jsonl, datasets.jsonl, and variables.jsonl;
    gold_links.jsonl is optional. Sentence spans are computed here.
    """
    root = Path(root_path)
    paths = {name: root / f"{name}.jsonl" for name in ("publications", "datasets", "variables")}
    for path in paths.values():
        if not path.is_file():
            raise MissingFile(path)

    publications = _keyed(
        _read_jsonl(paths["publications"], _parse_publication), "publications.jsonl"
    )
    datasets = _keyed(_read_jsonl(paths["datasets"], _parse_dataset), "datasets.jsonl")
    variables = _keyed(_read_jsonl(paths["variables"], _parse_variable), "variables.jsonl")

    gold_path = root / "gold_links.jsonl"
    gold_links = None
    if gold_path.is_file():
        gold_links = [rec for _, rec in _read_jsonl(gold_path, _parse_gold_link)]

    return CorpusBundle(
        publications=publications,
        datasets=datasets,
        variables=variables,
        gold_links=gold_links,
    )


def _publication_record(pub: Publication) -> dict:
    return {
        "id": pub.id,
        "title": pub.title,
        "abstract": pub.abstract,
        "authors": pub.authors,
        "year": pub.year,
        "lang": pub.language.value,
        "dataset_ids": pub.dataset_ids,
        "full_text": pub.full_text,
    }


def save_corpus(bundle: CorpusBundle, root_path: "Path | str") -> None:
    """Serialize ``bundle`` back to JSONL under ``root_path``.

    Records are written sorted by id with canonical JSON, so reloading
    yields a structurally equal bundle and identical files across runs.
    """
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)

    def dump(path: Path, records: list[dict]) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")

    dump(root / "publications.jsonl",
         [_publication_record(p) for _, p in sorted(bundle.publications.items())])
    dump(root / "datasets.jsonl",
         [{"id": d.id, "title": d.title, "variable_ids": d.variable_ids}
          for _, d in sorted(bundle.datasets.items())])
    dump(root / "variables.jsonl",
         [{"id": v.id, "dataset_id": v.dataset_id, "label": v.label,
           "question_text": v.question_text, "answer_categories": v.answer_categories}
          for _, v in sorted(bundle.variables.items())])
    if bundle.gold_links is not None:
        dump(root / "gold_links.jsonl",
             [{"publication_id": g.publication_id, "sentence_index": g.sentence_index,
               "variable_id": g.variable_id} for g in bundle.gold_links])


def validate_links(bundle: CorpusBundle) -> ValidationReport:
    """Report every dangling reference in the bundle; never mutates it."""
    findings: list[Finding] = []

    for pub_id in sorted(bundle.publications):
        for ds_id in bundle.publications[pub_id].dataset_ids:
            if ds_id not in bundle.datasets:
                findings.append(Finding("missing_dataset", "publication", pub_id, ds_id))

    for ds_id in sorted(bundle.datasets):
        for var_id in bundle.datasets[ds_id].variable_ids:
            if var_id not in bundle.variables:
                findings.append(Finding("missing_variable", "dataset", ds_id, var_id))

    for var_id in sorted(bundle.variables):
        ds_id = bundle.variables[var_id].dataset_id
        if ds_id not in bundle.datasets:
            findings.append(Finding("missing_dataset", "variable", var_id, ds_id))

    for gold in bundle.gold_links or []:
        pub = bundle.publications.get(gold.publication_id)
        if pub is None:
            findings.append(
                Finding("missing_publication", "gold_link", gold.publication_id,
                        gold.publication_id))
        elif not 0 <= gold.sentence_index < len(pub.sentences):
            findings.append(
                Finding("bad_sentence_index", "gold_link", gold.publication_id,
                        str(gold.sentence_index)))
        if gold.variable_id not in bundle.variables:
            findings.append(
                Finding("missing_variable", "gold_link", gold.publication_id,
                        gold.variable_id))

    return ValidationReport(findings=findings)


def content_hash(publication: Publication) -> str:
    """Stable 64-bit hex hash of the publication's identifying content.

    Covers id, title, abstract, full_text, and the dataset ids in sorted
    order, so reordering dataset_ids does not change the hash.
    """
    parts = [
        publication.id,
        publication.title,
        publication.abstract,
        publication.full_text,
        "\x1e".join(sorted(publication.dataset_ids)),
    ]
    return fnv1a64_hex("\x1f".join(parts).encode("utf-8"))
