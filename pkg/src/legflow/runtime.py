"""Wiring helpers: build harnesses and executors from bundled or user data."""
from __future__ import annotations

import json
from pathlib import Path

from . import data_path
from .evaluator import CorpusEntry, Harness, load_corpus
from .gateway import ChatBackend, HttpChatBackend, ProviderConfig, ScriptedBackend
from .provenance import Ledger
from .registry import Registry, load_registry
from .tools import FixtureBackend


def default_registry() -> Registry:
    return load_registry(data_path("registry.json"))


def default_patterns() -> dict:
    return json.loads(data_path("patterns.json").read_text())


def default_heuristics_text() -> str:
    return data_path("heuristics.txt").read_text()


def default_fixture_backend() -> FixtureBackend:
    return FixtureBackend(data_path("fixtures", "world.json"))


def benchmark_corpus() -> list[CorpusEntry]:
    return load_corpus(data_path("corpus", "benchmark.json"))


def ablation_subset() -> list[CorpusEntry]:
    ids = json.loads(data_path("corpus", "ablation_subset.json").read_text())
    by_id = {e.id: e for e in benchmark_corpus()}
    return [by_id[i] for i in ids]


def scripted_model_factory(scenarios_dir: Path | None = None):
    """Each (query, variant) pair gets a fresh replay backend.

    Variant-specific script files (``<id>.<variant>.json``) take precedence;
    everything else replays the query's base script. Entries that don't name
    a script (gateway sessions) are resolved by exact query text against the
    bundled corpora.
    """
    base = scenarios_dir or data_path("scenarios")
    by_query: dict[str, str] | None = None

    def _resolve_by_query(query: str) -> str:
        nonlocal by_query
        if by_query is None:
            by_query = {}
            corpus_dir = base.parent / "corpus"
            for doc_path in sorted(corpus_dir.glob("*.json")) if corpus_dir.exists() else []:
                doc = json.loads(doc_path.read_text())
                stack = [doc]
                while stack:
                    item = stack.pop()
                    if isinstance(item, dict):
                        if "query" in item and "scenario_script" in item:
                            by_query.setdefault(item["query"], item["scenario_script"])
                        stack.extend(item.values())
                    elif isinstance(item, list):
                        stack.extend(item)
        script = by_query.get(query)
        if script is None:
            raise FileNotFoundError(
                "no scripted scenario for this query; run one of the bundled corpus queries or configure a live provider"
            )
        return script

    def factory(entry: CorpusEntry, variant: str) -> ScriptedBackend:
        script_ref = entry.scenario_script or _resolve_by_query(entry.query)
        name = script_ref.rsplit("/", 1)[-1]
        stem = name[: -len(".json")] if name.endswith(".json") else name
        candidates = []
        if variant and variant not in ("full", "plan"):
            candidates.append(base / f"{stem}.{variant}.json")
        candidates.append(base / name)
        for path in candidates:
            if path.exists():
                return ScriptedBackend(path)
        raise FileNotFoundError(f"no scenario script for {entry.id} (variant {variant})")

    return factory


def live_model_factory(provider: ProviderConfig):
    backend = HttpChatBackend(provider)

    def factory(entry: CorpusEntry, variant: str) -> ChatBackend:
        return backend

    return factory


def make_scripted_harness(
    ledger_dir: Path | None = None,
    scenarios_dir: Path | None = None,
    width: int = 1,
    round_cap: int = 8,
) -> Harness:
    return Harness(
        registry=default_registry(),
        heuristics_text=default_heuristics_text(),
        model_factory=scripted_model_factory(scenarios_dir),
        tool_backend=default_fixture_backend(),
        patterns=default_patterns(),
        ledger_factory=(lambda: Ledger(ledger_dir)) if ledger_dir else Ledger,
        round_cap=round_cap,
        width=width,
    )
