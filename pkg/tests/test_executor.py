from __future__ import annotations

import json
import re

import pytest

from legflow import data_path
from legflow.executor import (
    VARIANT_NO_CONSOLIDATION,
    VARIANT_NO_REPORTER,
    Brief,
    Executor,
    static_leg,
)
from legflow.gateway import ScriptedBackend, UsageLedger, scripted_backend
from legflow.leg import K_CONSOLIDATOR, K_MERGE, LegNode, compile_leg, parse_plan
from legflow.provenance import Ledger
from legflow.tools import FaultPlan

SENTINEL = re.compile(r"<!--brief:[^>]+-->")


def demo_backend(name: str) -> ScriptedBackend:
    return ScriptedBackend(data_path("scenarios", f"{name}.json"))


def run_demo(harness, demo_entries, name, variant="full", fault=None, model=None):
    entry = demo_entries[name]
    return harness.run_query(entry, variant=variant, fault=fault, model=model)


# -- single specialist track (monthly maxima walkthrough) -----------------------------


def test_single_specialist_monthly_walkthrough(harness, demo_entries):
    run = run_demo(harness, demo_entries, "demo_monthly_levels")
    assert not run.result.failed
    assert [n.kind for n in run.leg.nodes] == ["specialist", "reporter"]
    brief = run.result.per_node_outputs["t0.l0.noaa_coops"]
    assert len(re.findall(r"2025-\d{2}: \d\.\d{2} m", brief.text)) == 12
    assert "9414290" in run.result.final_text
    # three tool calls recorded: station search, monthly stats, thresholds
    records = run.ledger.query_ledger(run.result.trace_id, kind="tool_call")
    assert [r["tool_name"] for r in records] == [
        "noaa_search_stations",
        "noaa_get_monthly_water_level_stats",
        "noaa_coops_datagetter",
    ]


# -- multi-specialist track with consolidation ---------------------------------------


def test_multi_specialist_consolidation_and_reconciliation(harness, demo_entries):
    model = harness.model_factory(demo_entries["demo_surge_reconciliation"], "full")
    run = run_demo(harness, demo_entries, "demo_surge_reconciliation", model=model)
    assert not run.result.failed
    consolidator_node = run.leg.nodes_of_kind(K_CONSOLIDATOR)[0]
    brief = run.result.per_node_outputs[consolidator_node.node_id]
    assert "complementary, not contradictory" in brief.text
    assert "2.30" in brief.text and "4.2" in brief.text
    assert "2.21" in run.result.final_text and "4.20" in run.result.final_text
    # consolidated brief subsumes the layer: raw specialist text stays upstream
    assert brief.source_briefs == ("t0.l1.noaa_coops", "t0.l1.usgs")
    reporter_request = next(r for r in model.requests if r.stage == "reporter")
    assert not SENTINEL.search(reporter_request.rendered_text())
    # the surge computation happened exactly once on this run
    surge_calls = run.ledger.query_ledger(run.result.trace_id, tool="noaa_compute_surge")
    assert len(surge_calls) == 1


def test_barrier_holds_under_parallel_width(demo_entries):
    from legflow.runtime import make_scripted_harness

    harness = make_scripted_harness(width=4)
    run = run_demo(harness, demo_entries, "demo_surge_reconciliation")
    assert not run.result.failed
    annos = {r["node_id"]: r for r in run.ledger.query_ledger(run.result.trace_id, kind="node")}
    nhc_end = annos["t0.l0.nhc"]["started_at"] + annos["t0.l0.nhc"]["duration_s"]
    for node in ("t0.l1.noaa_coops", "t0.l1.usgs"):
        assert annos[node]["started_at"] >= nhc_end - 1e-6


def test_no_reporter_returns_consolidator_brief(harness, demo_entries):
    run = run_demo(harness, demo_entries, "demo_surge_reconciliation", variant=VARIANT_NO_REPORTER)
    consolidator_node = run.leg.nodes_of_kind(K_CONSOLIDATOR)[0]
    assert run.result.final_text == run.result.per_node_outputs[consolidator_node.node_id].text


def test_no_consolidation_accumulates_raw_briefs(harness, demo_entries):
    model = harness.model_factory(demo_entries["demo_surge_reconciliation"], "full")
    run = run_demo(harness, demo_entries, "demo_surge_reconciliation", variant=VARIANT_NO_CONSOLIDATION, model=model)
    assert not run.result.failed
    reporter_request = next(r for r in model.requests if r.stage == "reporter")
    rendered = reporter_request.rendered_text()
    for node in ("t0.l0.nhc", "t0.l1.noaa_coops", "t0.l1.usgs"):
        brief = run.result.per_node_outputs[node]
        assert brief.text in rendered


# -- image understanding ---------------------------------------------------------------


def test_image_layer_interpretation(harness, demo_entries):
    model = harness.model_factory(demo_entries["demo_image_guidance"], "full")
    run = run_demo(harness, demo_entries, "demo_image_guidance", model=model)
    assert not run.result.failed
    kinds = [n.kind for n in run.leg.nodes]
    assert kinds == ["specialist", "specialist", "image", "reporter"]
    image_request = next(r for r in model.requests if r.has_images())
    assert image_request.stage == "consolidator"
    names = [p.image_path for m in image_request.messages for p in m.parts if p.kind == "image"]
    assert any(n.endswith("stofs_contour.png") for n in names)
    assert any(n.endswith("osm_basemap.png") for n in names)
    assert "2.6-2.9 m" in run.result.final_text


# -- multi-track merge ------------------------------------------------------------------


def test_four_tracks_merge_and_numbered_answer(harness, demo_entries):
    run = run_demo(harness, demo_entries, "demo_four_tracks")
    assert not run.result.failed
    assert run.leg.track_count == 4
    assert len(run.leg.nodes_of_kind(K_MERGE)) == 1
    nhc_nodes = [n.node_id for n in run.leg.nodes if n.agent_id == "nhc"]
    assert len(nhc_nodes) == 2 and len(set(nhc_nodes)) == 2
    for marker in ("1.", "2.", "3.", "4."):
        assert marker in run.result.final_text
    merge_node = run.leg.nodes_of_kind(K_MERGE)[0]
    merged = run.result.per_node_outputs[merge_node.node_id]
    assert len(merged.source_briefs) == 4


# -- faults ------------------------------------------------------------------------------


def test_fault_run_completes_from_remaining_sources(harness, corpus_by_id):
    doc = json.loads(data_path("corpus", "fault.json").read_text())
    from legflow.evaluator import CorpusEntry

    entry = CorpusEntry.from_dict(doc["entry"])
    model = harness.model_factory(entry, "fault_noaa_coops")
    run = harness.run_query(entry, fault=FaultPlan("noaa_coops"), model=model)
    assert not run.result.failed
    assert run.result.final_text.strip()
    assert "Category 2" in run.result.final_text  # track context survived
    assert "4.6-6.1" in run.result.final_text  # survey data survived
    errors = run.ledger.query_ledger(run.result.trace_id, kind="tool_call", outcome="error")
    assert errors and all(r["node_id"].endswith("noaa_coops") for r in errors)


def test_fault_is_surgical_against_baseline(harness, corpus_by_id):
    doc = json.loads(data_path("corpus", "fault.json").read_text())
    from legflow.evaluator import CorpusEntry

    entry = CorpusEntry.from_dict(doc["entry"])
    base = harness.run_query(entry, model=harness.model_factory(entry, "full"))
    faulted = harness.run_query(
        entry, fault=FaultPlan("usgs"), model=harness.model_factory(entry, "fault_usgs")
    )

    def results_for(run, exclude_agent):
        out = []
        for r in run.ledger.query_ledger(run.result.trace_id, kind="tool_call"):
            if not r["node_id"].split(".")[-1] == exclude_agent:
                out.append((r["tool_name"], r["result_content_hash"], r["outcome"]))
        return sorted(out)

    assert results_for(base, "usgs") == results_for(faulted, "usgs")


# -- smaller units -------------------------------------------------------------------------


def _executor(registry, backend):
    return Executor(registry=registry, model=backend, tools=_NullTools(), ledger=Ledger())


class _NullTools:
    def execute(self, tool_name, arguments):
        raise AssertionError("no tool calls expected")


def test_consolidate_single_brief_identity(registry):
    backend = scripted_backend({"exchanges": []})  # any chat would raise
    ex = _executor(registry, backend)
    ledger = ex.ledger
    trace = ledger.open_trace("q")
    node = LegNode("t0.l2.consolidator", K_CONSOLIDATOR, "consolidator", 0, 2)
    brief = Brief(text="only one", producer_node="t0.l1.fema")
    out = ex.consolidate([brief], node, "goal", trace, UsageLedger())
    assert out.text == "only one"
    assert out.producer_node == "t0.l2.consolidator"
    assert out.source_briefs == ("t0.l1.fema",)


def test_consolidate_requires_briefs(registry):
    ex = _executor(registry, scripted_backend({"exchanges": []}))
    trace = ex.ledger.open_trace("q")
    node = LegNode("t0.l2.consolidator", K_CONSOLIDATOR, "consolidator", 0, 2)
    with pytest.raises(ValueError):
        ex.consolidate([], node, "goal", trace, UsageLedger())


def test_cross_track_merge_requires_two(registry):
    ex = _executor(registry, scripted_backend({"exchanges": []}))
    trace = ex.ledger.open_trace("q")
    node = LegNode("merge.cross_track_merge", K_MERGE, "cross_track_merge", None, 9)
    with pytest.raises(ValueError):
        ex.cross_track_merge([Brief(text="a", producer_node="x")], node, "g", trace, UsageLedger())


def test_disallowed_tool_recorded_and_loop_continues(registry, fixture_backend):
    backend = scripted_backend(
        {
            "exchanges": [
                {
                    "match": {"stage": "specialist", "pattern": "rounds=0"},
                    "respond": {"content": "", "tool_calls": [{"name": "nhc_get_best_track", "arguments": {"storm_id": "al092008"}}]},
                },
                {
                    "match": {"stage": "specialist", "pattern": "rounds=1"},
                    "respond": {"content": "done without that tool"},
                },
            ]
        }
    )
    ex = Executor(registry=registry, model=backend, tools=fixture_backend, ledger=Ledger())
    trace = ex.ledger.open_trace("q")
    node = LegNode("t0.l0.noaa_coops", "specialist", "noaa_coops", 0, 0)
    brief = ex.run_specialist(node, None, "goal", trace, UsageLedger())
    assert brief.text == "done without that tool"
    denied = ex.ledger.query_ledger(trace, outcome="denied")
    assert len(denied) == 1 and denied[0]["tool_name"] == "nhc_get_best_track"


def test_all_tools_failing_yields_unavailable_brief(registry, fixture_backend):
    backend = scripted_backend(
        {
            "exchanges": [
                {
                    "match": {"stage": "specialist", "pattern": "rounds=0"},
                    "respond": {"content": "", "tool_calls": [{"name": "noaa_compute_surge", "arguments": {"station_id": "1", "begin_date": "x", "end_date": "y"}}]},
                },
                {"match": {"stage": "specialist", "pattern": "rounds=1"}, "respond": {"content": ""}},
            ]
        }
    )
    ex = Executor(registry=registry, model=backend, tools=fixture_backend, ledger=Ledger())
    trace = ex.ledger.open_trace("q")
    node = LegNode("t0.l0.noaa_coops", "specialist", "noaa_coops", 0, 0)
    fault = FaultPlan("noaa_coops")
    brief = ex.run_specialist(node, None, "goal", trace, UsageLedger(), fault=fault)
    assert brief.text.startswith("DATA UNAVAILABLE: noaa_coops:")


def test_round_cap_produces_truncation_notice(registry, fixture_backend):
    backend = scripted_backend(
        {
            "exchanges": [
                {
                    "match": {"stage": "specialist", "pattern": "rounds="},
                    "respond": {"content": "", "tool_calls": [{"name": "nhc_get_storm_totals", "arguments": {"year": 2005}}]},
                    "repeatable": True,
                }
            ]
        }
    )
    ex = Executor(registry=registry, model=backend, tools=fixture_backend, ledger=Ledger(), round_cap=3)
    trace = ex.ledger.open_trace("q")
    node = LegNode("t0.l0.nhc", "specialist", "nhc", 0, 0)
    brief = ex.run_specialist(node, None, "goal", trace, UsageLedger())
    assert "round cap" in brief.text
    assert len(ex.ledger.query_ledger(trace, kind="tool_call")) == 3


def test_model_transport_failure_marks_run_failed(registry, fixture_backend):
    backend = scripted_backend({"exchanges": []})
    leg = compile_leg(parse_plan(json.dumps({"topology": "linear", "tracks": [{"goal": "g", "layers": [["nhc"]]}]})), registry)
    ex = Executor(registry=registry, model=backend, tools=fixture_backend, ledger=Ledger())
    result = ex.execute(leg, "goal")
    assert result.failed
    assert "unscripted exchange" in (result.error or "")


def test_execute_rejects_unknown_variant(registry, fixture_backend):
    leg = static_leg(registry)
    ex = Executor(registry=registry, model=scripted_backend({"exchanges": []}), tools=fixture_backend, ledger=Ledger())
    with pytest.raises(ValueError):
        ex.execute(leg, "g", variant="overseer")


def test_determinism_across_runs(harness, corpus_by_id):
    def normalized(run):
        doc = run.ledger.export_trace(run.result.trace_id)
        doc["header"].pop("trace_id")
        doc["header"].pop("opened_at")
        for r in doc["records"]:
            for k in ("trace_id", "started_at", "duration_s", "at"):
                r.pop(k, None)
        return json.dumps(doc, sort_keys=True)

    entry = corpus_by_id["M01"]
    a = harness.run_query(entry)
    b = harness.run_query(entry)
    assert a.result.final_text == b.result.final_text
    assert normalized(a) == normalized(b)
