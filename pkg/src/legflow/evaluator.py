"""Scoring and harnesses: the four metrics, benchmark/ablation/stress runners,
and token-cost accounting.

Scoring is pure and deterministic: numeric closeness against an authoritative
reference, binary topology choice, set-based specialist F1, and rubric-pattern
source attribution over the combined pipeline texts.
"""
from __future__ import annotations

import json
import re
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import gateway
from .architect import ArchitectRequest, ProposedPlan, propose_plan
from .executor import VARIANT_FIXED_GRAPH, VARIANT_FULL, Executor, RunResult, static_leg
from .gateway import ChatBackend, Usage, UsageLedger
from .leg import K_CONSOLIDATOR, K_IMAGE, K_MERGE, K_REPORTER, Leg, compile_leg
from .provenance import Ledger
from .registry import Registry, catalog_for_architect
from .tools import FaultPlan, ToolBackend

FT_TO_M = 0.3048

KIND_SURGE = "surge"
KIND_COUNT = "count"
KIND_CATEGORY = "category"
KIND_FLOOD_ZONE = "flood_zone"
KIND_MULTI = "multi"
KINDS = (KIND_SURGE, KIND_COUNT, KIND_CATEGORY, KIND_FLOOD_ZONE, KIND_MULTI)

ZONE_CODES = ("VE", "AE", "AO", "AH", "A99")
_ZONE_WORD = ("A", "V", "X", "D")


class EvaluatorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Ground truth and extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RubricComponent:
    name: str
    pattern: str


@dataclass(frozen=True)
class GroundTruth:
    query_id: str
    kind: str
    value: float | None = None  # surge: meters; count: integer
    unit: str = "m"
    category_label: str | None = None
    expected_zones: frozenset[str] = frozenset()
    sub_truths: tuple["GroundTruth", ...] = ()
    source_citation: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise EvaluatorError(f"unknown ground-truth kind {self.kind!r}")
        if self.kind == KIND_SURGE and (self.value is None or self.value <= 0):
            raise EvaluatorError(f"{self.query_id}: surge reference must be positive")
        if self.kind == KIND_MULTI and len(self.sub_truths) < 2:
            raise EvaluatorError(f"{self.query_id}: multi requires >= 2 sub-truths")

    @staticmethod
    def from_dict(query_id: str, doc: dict) -> "GroundTruth":
        kind = doc.get("kind", "")
        if kind == KIND_MULTI:
            parts = tuple(
                GroundTruth.from_dict(f"{query_id}.{i}", p) for i, p in enumerate(doc.get("parts", []))
            )
            return GroundTruth(query_id=query_id, kind=kind, sub_truths=parts, source_citation=doc.get("source", ""))
        return GroundTruth(
            query_id=query_id,
            kind=kind,
            value=doc.get("value"),
            unit=doc.get("unit", "m"),
            category_label=doc.get("label"),
            expected_zones=frozenset(doc.get("zones", [])),
            source_citation=doc.get("source", ""),
        )


@dataclass(frozen=True)
class QuantityCandidate:
    kind: str
    value: float | None
    unit: str
    normalized: float | None  # meters for surge, raw for count
    label: str | None
    span: tuple[int, int]


_NUM_UNIT = re.compile(r"(\d+(?:[.,]\d+)?)\s*(m\b|meters?\b|metres?\b|ft\b|feet\b|foot\b)", re.IGNORECASE)
# standalone integers only: never digits inside a decimal or a longer number
_INT = re.compile(r"(?<!\d)(?<!\d\.)(\d{1,6})(?!\.?\d)")
_CATEGORY = re.compile(r"\bCat(?:egory)?\.?\s*~?\s*([1-5])\b", re.IGNORECASE)
_ZONE_TWO = re.compile(r"\b(VE|AE|AO|AH|A99)\b")
_ZONE_ONE = re.compile(r"\bZone\s+(A|V|X|D)\b", re.IGNORECASE)


def _to_meters(value: float, unit: str) -> float | None:
    u = unit.lower().rstrip(".")
    if u.startswith("m"):
        return value
    if u in ("ft", "feet", "foot"):
        return value * FT_TO_M
    return None  # unit not in the normalization table


def extract_quantities(answer_text: str, kind: str) -> list[QuantityCandidate]:
    """Pull scoreable spans out of answer text, per ground-truth kind.

    For ``multi`` the extraction runs for every kind and tags each candidate,
    so the scorer can filter per sub-question.
    """
    text = answer_text or ""
    out: list[QuantityCandidate] = []
    if kind in (KIND_SURGE, KIND_MULTI):
        for m in _NUM_UNIT.finditer(text):
            value = float(m.group(1).replace(",", "."))
            normalized = _to_meters(value, m.group(2))
            if normalized is None:
                continue
            out.append(QuantityCandidate(KIND_SURGE, value, m.group(2), normalized, None, m.span()))
    if kind in (KIND_COUNT, KIND_MULTI):
        for m in _INT.finditer(text):
            value = int(m.group(1))
            if 1900 <= value <= 2100:
                continue  # almost certainly a year
            out.append(QuantityCandidate(KIND_COUNT, float(value), "", float(value), None, m.span()))
    if kind in (KIND_CATEGORY, KIND_MULTI):
        for m in _CATEGORY.finditer(text):
            out.append(QuantityCandidate(KIND_CATEGORY, None, "", None, f"Cat {m.group(1)}", m.span()))
    if kind in (KIND_FLOOD_ZONE, KIND_MULTI):
        for m in _ZONE_TWO.finditer(text):
            out.append(QuantityCandidate(KIND_FLOOD_ZONE, None, "", None, m.group(1), m.span()))
        for m in _ZONE_ONE.finditer(text):
            out.append(QuantityCandidate(KIND_FLOOD_ZONE, None, "", None, m.group(1).upper(), m.span()))
    return out


# ---------------------------------------------------------------------------
# Metric scores
# ---------------------------------------------------------------------------


def _closeness(candidates: list[QuantityCandidate], y: float, kind: str) -> float:
    values = [c.normalized for c in candidates if c.kind == kind and c.normalized is not None]
    if not values:
        return 0.0
    return max(max(0.0, 1.0 - abs(v - y) / y) for v in values)


def score_factual_precision(candidates: list[QuantityCandidate], truth: GroundTruth) -> float:
    """Closeness of the best extracted value to the reference.

    surge/count: max over candidates of max(0, 1 - |v - y| / y); category is
    binary; flood_zone is the fraction of expected codes mentioned; multi is
    the mean over sub-questions.
    """
    if truth.kind == KIND_SURGE:
        return _closeness(candidates, float(truth.value), KIND_SURGE)
    if truth.kind == KIND_COUNT:
        return _closeness(candidates, float(truth.value), KIND_COUNT)
    if truth.kind == KIND_CATEGORY:
        labels = {c.label for c in candidates if c.kind == KIND_CATEGORY}
        return 1.0 if truth.category_label in labels else 0.0
    if truth.kind == KIND_FLOOD_ZONE:
        if not truth.expected_zones:
            raise EvaluatorError(f"{truth.query_id}: flood_zone truth without expected zones")
        mentioned = {c.label for c in candidates if c.kind == KIND_FLOOD_ZONE}
        return len(truth.expected_zones & mentioned) / len(truth.expected_zones)
    if truth.kind == KIND_MULTI:
        return sum(score_factual_precision(candidates, sub) for sub in truth.sub_truths) / len(truth.sub_truths)
    raise EvaluatorError(f"kind mismatch: {truth.kind}")


def score_answer(answer_text: str, truth: GroundTruth) -> float:
    return score_factual_precision(extract_quantities(answer_text, truth.kind), truth)


def score_topology(plan_topology: str, expected_topology: str) -> int:
    return 1 if plan_topology == expected_topology else 0


def score_agent_f1(selected: set[str], expected: set[str]) -> float:
    """Harmonic mean of precision and recall of the chosen specialist set."""
    if not expected:
        raise EvaluatorError("expected agent set is empty")
    if not selected:
        return 0.0
    inter = len(selected & expected)
    p = inter / len(selected)
    r = inter / len(expected)
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def score_source_attribution(pipeline_texts: dict[str, str], rubric: list[RubricComponent]) -> float:
    """Each rubric component scores 1 if its pattern appears anywhere in the
    combined consolidator / cross-track-merge / reporter text."""
    if not rubric:
        raise EvaluatorError("empty attribution rubric")
    combined = "\n".join(pipeline_texts.get(k, "") for k in ("consolidator", "cross_track_merge", "reporter"))
    hits = sum(1 for comp in rubric if re.search(comp.pattern, combined))
    return hits / len(rubric)


@dataclass(frozen=True)
class MetricScores:
    factual_precision: float
    topology_selection: float
    agent_f1: float
    source_attribution: float
    latency_s: float = 0.0

    def __post_init__(self) -> None:
        for name in ("factual_precision", "topology_selection", "agent_f1", "source_attribution"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise EvaluatorError(f"{name} out of range: {v}")

    @property
    def overall(self) -> float:
        return (self.factual_precision + self.topology_selection + self.agent_f1 + self.source_attribution) / 4.0

    @property
    def passed(self) -> bool:
        return self.overall >= 0.5

    def to_dict(self) -> dict:
        return {
            "factual_precision": self.factual_precision,
            "topology_selection": self.topology_selection,
            "agent_f1": self.agent_f1,
            "source_attribution": self.source_attribution,
            "overall": self.overall,
            "latency_s": self.latency_s,
        }


def overall_score(scores: MetricScores) -> float:
    return scores.overall


# ---------------------------------------------------------------------------
# Cost accounting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostModel:
    input_rate: float  # currency per million input tokens
    output_rate: float

    def __post_init__(self) -> None:
        if self.input_rate < 0 or self.output_rate < 0:
            raise EvaluatorError("rates must be non-negative")

    def cost(self, usage: Usage) -> float:
        return usage.input_tokens * self.input_rate / 1e6 + usage.output_tokens * self.output_rate / 1e6


def tally_cost(usage_by_stage: dict[str, Usage], model: CostModel, query_count: int | None = None) -> dict:
    per_stage = {stage: model.cost(u) for stage, u in sorted(usage_by_stage.items())}
    total_usage = Usage()
    for u in usage_by_stage.values():
        total_usage = total_usage + u
    total_cost = model.cost(total_usage)
    out = {
        "per_stage_cost": per_stage,
        "total_cost": total_cost,
        "total_input_tokens": total_usage.input_tokens,
        "total_output_tokens": total_usage.output_tokens,
        "total_tokens": total_usage.total,
    }
    if query_count:
        out["per_query_average_cost"] = total_cost / query_count
        out["per_query_average_tokens"] = total_usage.total / query_count
    return out


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    query: str
    category: str
    kind: str
    expected_topology: str
    expected_agents: frozenset[str]
    truth: GroundTruth
    rubric: tuple[RubricComponent, ...]
    scenario_script: str
    fixtures_ref: str
    sub_questions: int = 1

    @staticmethod
    def from_dict(doc: dict) -> "CorpusEntry":
        rubric = tuple(RubricComponent(c["name"], c["pattern"]) for c in doc.get("rubric", []))
        return CorpusEntry(
            id=doc["id"],
            query=doc["query"],
            category=doc.get("category", ""),
            kind=doc["kind"],
            expected_topology=doc["expected_topology"],
            expected_agents=frozenset(doc.get("expected_agents", [])),
            truth=GroundTruth.from_dict(doc["id"], doc.get("ground_truth", {})),
            rubric=rubric,
            scenario_script=doc.get("scenario_script", ""),
            fixtures_ref=doc.get("fixtures_ref", ""),
            sub_questions=int(doc.get("sub_questions", 1)),
        )


def load_corpus(path: str | Path) -> list[CorpusEntry]:
    docs = json.loads(Path(path).read_text())
    entries = [CorpusEntry.from_dict(d) for d in docs]
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise EvaluatorError("corpus has duplicate query ids")
    return entries


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

ModelFactory = Callable[[CorpusEntry, str], ChatBackend]


@dataclass
class Harness:
    """Everything needed to run corpus queries end to end."""

    registry: Registry
    heuristics_text: str
    model_factory: ModelFactory
    tool_backend: ToolBackend
    patterns: dict | None = None
    ledger_factory: Callable[[], Ledger] = Ledger
    round_cap: int = 8
    width: int = 1

    def run_query(
        self,
        entry: CorpusEntry,
        variant: str = VARIANT_FULL,
        fault: FaultPlan | None = None,
        model: ChatBackend | None = None,
    ) -> "QueryRun":
        """Plan (or take the static graph) and execute one corpus query."""
        backend = model or self.model_factory(entry, variant)
        ledger = self.ledger_factory()
        usage = UsageLedger()
        started = time.monotonic()
        if variant == VARIANT_FIXED_GRAPH:
            leg = static_leg(self.registry)
            proposed = None
        else:
            proposed = propose_plan(
                ArchitectRequest(
                    query_text=entry.query,
                    catalog=tuple(catalog_for_architect(self.registry)),
                    heuristics_text=self.heuristics_text,
                ),
                backend,
                self.registry,
                self.patterns,
            )
            usage.accumulate(gateway.ARCHITECT, proposed.usage)
            leg = compile_leg(proposed.plan, self.registry)
        executor = Executor(
            registry=self.registry,
            model=backend,
            tools=self.tool_backend,
            ledger=ledger,
            round_cap=self.round_cap,
            width=self.width,
        )
        result = executor.execute(leg, entry.query, variant=variant, fault=fault, usage=usage)
        latency = time.monotonic() - started
        return QueryRun(entry=entry, proposed=proposed, leg=leg, result=result, ledger=ledger, latency_s=latency)


@dataclass
class QueryRun:
    entry: CorpusEntry
    proposed: ProposedPlan | None
    leg: Leg
    result: RunResult
    ledger: Ledger
    latency_s: float

    def pipeline_texts(self) -> dict[str, str]:
        return {
            "consolidator": "\n\n".join(
                self.result.per_node_outputs[n.node_id].text
                for n in self.leg.nodes
                if n.kind in (K_CONSOLIDATOR, K_IMAGE) and n.node_id in self.result.per_node_outputs
            ),
            "cross_track_merge": self.result.stage_text(K_MERGE, self.leg),
            "reporter": self.result.stage_text(K_REPORTER, self.leg),
        }

    def scores(self) -> MetricScores:
        plan_topology = self.leg.plan.topology
        selected = self.leg.specialist_ids()
        return MetricScores(
            factual_precision=score_answer(self.result.final_text, self.entry.truth),
            topology_selection=float(score_topology(plan_topology, self.entry.expected_topology)),
            agent_f1=score_agent_f1(selected, set(self.entry.expected_agents)),
            source_attribution=score_source_attribution(self.pipeline_texts(), list(self.entry.rubric)),
            latency_s=self.latency_s,
        )


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def category_report(per_query: dict[str, MetricScores], grouping: dict[str, str]) -> dict:
    """Per-category metric means plus the overall column, benchmark-table shaped."""
    categories: dict[str, list[MetricScores]] = {}
    for qid, scores in per_query.items():
        categories.setdefault(grouping.get(qid, "uncategorized"), []).append(scores)
    table: dict[str, dict] = {}
    for cat, scores in sorted(categories.items()):
        table[cat] = {
            "n": len(scores),
            "factual_precision": _mean([s.factual_precision for s in scores]) * 100,
            "topology_selection": _mean([s.topology_selection for s in scores]) * 100,
            "agent_f1": _mean([s.agent_f1 for s in scores]) * 100,
            "source_attribution": _mean([s.source_attribution for s in scores]) * 100,
            "overall": _mean([s.overall for s in scores]) * 100,
            "avg_latency_s": _mean([s.latency_s for s in scores]),
        }
    alls = list(per_query.values())
    table["overall"] = {
        "n": len(alls),
        "factual_precision": _mean([s.factual_precision for s in alls]) * 100,
        "topology_selection": _mean([s.topology_selection for s in alls]) * 100,
        "agent_f1": _mean([s.agent_f1 for s in alls]) * 100,
        "source_attribution": _mean([s.source_attribution for s in alls]) * 100,
        "overall": _mean([s.overall for s in alls]) * 100,
        "avg_latency_s": _mean([s.latency_s for s in alls]),
        "pass_rate": _mean([1.0 if s.passed else 0.0 for s in alls]) * 100,
    }
    return table


def run_benchmark(corpus: list[CorpusEntry], harness: Harness, variant: str = VARIANT_FULL) -> dict:
    """Run every corpus query, score it, and assemble the category table."""
    per_query: dict[str, MetricScores] = {}
    grouping: dict[str, str] = {}
    runs: dict[str, QueryRun] = {}
    errors: list[str] = []
    for entry in corpus:
        run = harness.run_query(entry, variant=variant)
        runs[entry.id] = run
        if run.result.failed:
            errors.append(f"{entry.id}: {run.result.error}")
        per_query[entry.id] = run.scores()
        grouping[entry.id] = entry.category
    report = {
        "variant": variant,
        "per_query": {qid: s.to_dict() for qid, s in sorted(per_query.items())},
        "categories": category_report(per_query, grouping),
        "errors": errors,
    }
    report["runs"] = runs  # live objects for downstream inspection; dropped on serialization
    return report


METRIC_KEYS = ("factual_precision", "topology_selection", "agent_f1", "source_attribution")


def run_ablation(
    subset: list[CorpusEntry],
    harness: Harness,
    variants: tuple[str, ...] = ("fixed_graph", "no_consolidation", "no_reporter"),
) -> dict:
    """Baseline vs single-component-disabled runs; deltas in percentage points."""
    baseline = run_benchmark(subset, harness, VARIANT_FULL)
    base_means = {k: _mean([q[k] for q in baseline["per_query"].values()]) * 100 for k in METRIC_KEYS}
    base_means["latency_s"] = _mean([q["latency_s"] for q in baseline["per_query"].values()])
    table: dict[str, dict] = {}
    for variant in variants:
        rep = run_benchmark(subset, harness, variant)
        means = {k: _mean([q[k] for q in rep["per_query"].values()]) * 100 for k in METRIC_KEYS}
        means["latency_s"] = _mean([q["latency_s"] for q in rep["per_query"].values()])
        table[variant] = {
            "scores": means,
            "delta": {k: means[k] - base_means[k] for k in means},
            "errors": rep["errors"],
        }
    return {"baseline": base_means, "variants": table}


def run_topology_harness(corpus: list[CorpusEntry], harness: Harness) -> dict:
    """Plan-only pass over the corpus: does the planner pick the right shape?"""
    failures: list[str] = []
    per_query: dict[str, int] = {}
    for entry in corpus:
        backend = harness.model_factory(entry, "plan")
        proposed = propose_plan(
            ArchitectRequest(
                query_text=entry.query,
                catalog=tuple(catalog_for_architect(harness.registry)),
                heuristics_text=harness.heuristics_text,
            ),
            backend,
            harness.registry,
            harness.patterns,
        )
        ok = score_topology(proposed.plan.topology, entry.expected_topology)
        per_query[entry.id] = ok
        if not ok:
            failures.append(entry.id)
    score = _mean([float(v) for v in per_query.values()]) * 100
    return {"score": score, "per_query": per_query, "failures": failures}


# ---------------------------------------------------------------------------
# Stress runners
# ---------------------------------------------------------------------------


def run_scaling_stress(levels: dict[int, list[CorpusEntry]], harness: Harness) -> dict:
    """Factual accuracy and latency as sub-question count grows."""
    rows = []
    for n_sub in sorted(levels):
        entries = levels[n_sub]
        scores = []
        latencies = []
        for entry in entries:
            run = harness.run_query(entry)
            scores.append(score_answer(run.result.final_text, entry.truth))
            latencies.append(run.latency_s)
        rows.append(
            {
                "sub_questions": n_sub,
                "n": len(entries),
                "accuracy": _mean(scores) * 100,
                "avg_latency_s": _mean(latencies),
            }
        )
    return {"rows": rows}


def run_paraphrase_stress(groups: dict[str, list[CorpusEntry]], harness: Harness) -> dict:
    """Same question, three phrasings: does the shape and agent set hold?"""
    rows = []
    sigmas = []
    topo_agree = 0
    agent_agree = 0
    for group_id in sorted(groups):
        variants = groups[group_id]
        topologies = []
        agent_sets = []
        factual = []
        for entry in variants:
            run = harness.run_query(entry)
            topologies.append(run.leg.plan.topology)
            agent_sets.append(frozenset(run.leg.specialist_ids()))
            factual.append(score_answer(run.result.final_text, entry.truth) * 100)
        topo_ok = len(set(topologies)) == 1
        agents_ok = len(set(agent_sets)) == 1
        sigma = statistics.pstdev(factual) if len(factual) > 1 else 0.0
        topo_agree += int(topo_ok)
        agent_agree += int(agents_ok)
        sigmas.append(sigma)
        rows.append(
            {
                "group": group_id,
                "variants": len(variants),
                "topology_agreement": topo_ok,
                "agent_agreement": agents_ok,
                "score_sigma": sigma,
            }
        )
    return {
        "rows": rows,
        "overall": {
            "topology_agreement": f"{topo_agree}/{len(groups)}",
            "agent_agreement": f"{agent_agree}/{len(groups)}",
            "mean_sigma": _mean(sigmas),
        },
    }


@dataclass(frozen=True)
class AdversarialRubric:
    issue_patterns: tuple[str, ...]
    fabrication_patterns: tuple[str, ...]
    response_patterns: tuple[str, ...]


def judge_adversarial(final_text: str, rubric: AdversarialRubric) -> dict:
    issue = any(re.search(p, final_text) for p in rubric.issue_patterns)
    fabricated = any(re.search(p, final_text) for p in rubric.fabrication_patterns)
    responsive = any(re.search(p, final_text) for p in rubric.response_patterns)
    return {"issue_detected": issue, "hallucination_free": not fabricated, "responsive": responsive}


def run_adversarial_stress(cases: list[dict], harness: Harness) -> dict:
    """Impossible or misleading premises: detect, refuse to fabricate, respond."""
    rows = []
    for case in cases:
        entry = CorpusEntry.from_dict(case["entry"])
        rubric = AdversarialRubric(
            issue_patterns=tuple(case["rubric"]["issue_patterns"]),
            fabrication_patterns=tuple(case["rubric"]["fabrication_patterns"]),
            response_patterns=tuple(case["rubric"]["response_patterns"]),
        )
        run = harness.run_query(entry)
        flags = judge_adversarial(run.result.final_text, rubric)
        rows.append({"id": entry.id, "type": case.get("type", ""), **flags})
    n = len(rows)
    return {
        "rows": rows,
        "overall": {
            "issue_detected": f"{sum(r['issue_detected'] for r in rows)}/{n}",
            "hallucination_free": f"{sum(r['hallucination_free'] for r in rows)}/{n}",
            "responsive": f"{sum(r['responsive'] for r in rows)}/{n}",
        },
    }


def run_fault_stress(entry: CorpusEntry, fault_agents: list[str], harness: Harness, limitation_pattern: str) -> dict:
    """One data source dark at a time: partial answer, noted limitation, no crash."""
    rows = []
    for agent_id in fault_agents:
        fault = FaultPlan(failed_specialist=agent_id)
        model = harness.model_factory(entry, f"fault_{agent_id}")
        crashed = False
        try:
            run = harness.run_query(entry, fault=fault, variant=VARIANT_FULL, model=model)
            final = run.result.final_text
            failed = run.result.failed
        except Exception:  # noqa: BLE001 - the whole point is to observe crashes
            crashed = True
            final = ""
            failed = True
        rows.append(
            {
                "failed_source": agent_id,
                "partial_answer": bool(final.strip()) and not failed,
                "notes_limitation": bool(re.search(limitation_pattern, final)),
                "no_crash": not crashed and not failed,
            }
        )
    n = len(rows)
    return {
        "rows": rows,
        "overall": {
            "partial_answer": f"{sum(r['partial_answer'] for r in rows)}/{n}",
            "notes_limitation": f"{sum(r['notes_limitation'] for r in rows)}/{n}",
            "no_crash": f"{sum(r['no_crash'] for r in rows)}/{n}",
        },
    }
