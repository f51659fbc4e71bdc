"""Shared fixtures: the committed corpus, fitted model, and mock backend.

Also prints a one-line PASS/FAIL verdict per acceptance criterion at the
end of the run (see pytest_terminal_summary below), so the acceptance
outcome is visible even when pytest captures stdout.
"""
from __future__ import annotations

from pathlib import Path

import pytest

from svlink.corpus import CorpusBundle, load_corpus
from svlink.mockbackend import MockBackend
from svlink.pipeline import fit_corpus_model
from svlink.svident import build_bank

FIXTURE_ROOT = Path(__file__).resolve().parent / "fixtures" / "corpus"


@pytest.fixture(scope="session")
def bundle() -> CorpusBundle:
    return load_corpus(FIXTURE_ROOT)


@pytest.fixture(scope="session")
def model(bundle):
    return fit_corpus_model(bundle)


@pytest.fixture(scope="session")
def bank(bundle, model):
    return build_bank(bundle.variables, bundle.datasets, model)


@pytest.fixture(scope="session")
def backend_server():
    with MockBackend() as server:
        yield server


# ---------------------------------------------------------------------------
# Acceptance reporting: one PASS/FAIL line per criterion test.

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        _ACCEPTANCE_RESULTS[name] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE_RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE_RESULTS.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}: {name}")
