"""Link survey variables to scholarly publications and search the results.

The package turns a JSONL corpus (publications, research datasets, survey
variables) into a searchable index: sentences that define survey variables
are detected and linked to the variables of the datasets each publication
declares, every publication gets a one-sentence summary, and a from-scratch
BM25 index serves ranked, filtered queries through a CLI and a REST API.
"""
from .config import ConfigError, ServiceConfig, load_config
from .corpus import (
    CorpusBundle,
    CorpusError,
    DuplicateId,
    GoldLink,
    MalformedRecord,
    MissingFile,
    Publication,
    ResearchDataset,
    SurveyVariable,
    load_corpus,
    save_corpus,
    validate_links,
)
from .evaluate import EvalResult, evaluate_bundle
from .pipeline import PipelineReport, ValidationFailed, run_pipeline, search_payload
from .searchidx import (
    IndexedDocument,
    InvalidQuery,
    Query,
    SearchHit,
    SearchIndex,
    SnapshotCorrupt,
)
from .summarize import BackendConfig, BackendError, CrossLingualUnavailable, NoSentences, Summary
from .svident import SentenceVariableLink, SvConfig, VariableBank, build_bank, identify_publication
from .textproc import LanguageTag, SentenceSpan, VectorizerModel, detect_language, segment_sentences

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "BackendError",
    "ConfigError",
    "CorpusBundle",
    "CorpusError",
    "CrossLingualUnavailable",
    "DuplicateId",
    "EvalResult",
    "GoldLink",
    "IndexedDocument",
    "InvalidQuery",
    "LanguageTag",
    "MalformedRecord",
    "MissingFile",
    "NoSentences",
    "PipelineReport",
    "Publication",
    "Query",
    "ResearchDataset",
    "SearchHit",
    "SearchIndex",
    "SentenceSpan",
    "SentenceVariableLink",
    "ServiceConfig",
    "SnapshotCorrupt",
    "Summary",
    "SurveyVariable",
    "SvConfig",
    "ValidationFailed",
    "VariableBank",
    "VectorizerModel",
    "build_bank",
    "detect_language",
    "evaluate_bundle",
    "identify_publication",
    "load_config",
    "load_corpus",
    "run_pipeline",
    "save_corpus",
    "search_payload",
    "segment_sentences",
    "validate_links",
    "__version__",
]
