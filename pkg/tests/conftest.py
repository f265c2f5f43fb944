from __future__ import annotations

import json

import pytest

from legflow import data_path
from legflow.evaluator import CorpusEntry
from legflow.registry import Registry, load_registry
from legflow.runtime import (
    ablation_subset,
    benchmark_corpus,
    default_fixture_backend,
    default_heuristics_text,
    default_patterns,
    make_scripted_harness,
)


@pytest.fixture(scope="session")
def registry() -> Registry:
    return load_registry(data_path("registry.json"))


@pytest.fixture(scope="session")
def patterns() -> dict:
    return default_patterns()


@pytest.fixture(scope="session")
def heuristics_text() -> str:
    return default_heuristics_text()


@pytest.fixture()
def harness():
    return make_scripted_harness()


@pytest.fixture(scope="session")
def corpus() -> list[CorpusEntry]:
    return benchmark_corpus()


@pytest.fixture(scope="session")
def corpus_by_id(corpus) -> dict[str, CorpusEntry]:
    return {e.id: e for e in corpus}


@pytest.fixture(scope="session")
def subset() -> list[CorpusEntry]:
    return ablation_subset()


@pytest.fixture(scope="session")
def fixture_backend():
    return default_fixture_backend()


@pytest.fixture(scope="session")
def demo_entries() -> dict[str, CorpusEntry]:
    docs = json.loads(data_path("corpus", "demos.json").read_text())
    return {d["id"]: CorpusEntry.from_dict(d) for d in docs}
