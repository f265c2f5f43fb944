from __future__ import annotations

import json
import threading
import time

import pytest

from legflow.provenance import Ledger, LedgerError, NodeAnnotation, ToolCallRecord, content_hash


def record(trace_id, node="t0.l0.nhc", tool="nhc_search_storms", outcome="ok", body="result body"):
    return ToolCallRecord(
        trace_id=trace_id,
        node_id=node,
        tool_name=tool,
        arguments_digest="d" * 64,
        arguments_preview='{"a":1}',
        started_at=time.time(),
        duration_s=0.01,
        result_content_hash=content_hash(body),
        result_preview=body,
        harvested_urls=("https://example.test/x",),
        outcome=outcome,
    )


def annotation(trace_id, node="t0.l0.nhc"):
    return NodeAnnotation(
        trace_id=trace_id,
        node_id=node,
        stage="specialist",
        inputs_digest=content_hash("in"),
        output_digest=content_hash("out"),
        started_at=time.time(),
        duration_s=0.02,
    )


def test_open_trace_unique_and_query_retrievable():
    ledger = Ledger()
    t1 = ledger.open_trace("query one")
    t2 = ledger.open_trace("query two")
    assert t1 != t2
    assert ledger.query_text(t1) == "query one"


def test_append_assigns_total_order():
    ledger = Ledger()
    t = ledger.open_trace("q")
    ledger.record_tool_call(record(t))
    ledger.annotate_node(annotation(t))
    seqs = [r["seq"] for r in ledger.query_ledger(t)]
    assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)


def test_unknown_trace_rejected():
    ledger = Ledger()
    with pytest.raises(LedgerError):
        ledger.record_tool_call(record("missing"))
    with pytest.raises(LedgerError):
        ledger.query_ledger("missing")


def test_duplicate_node_annotation_rejected():
    ledger = Ledger()
    t = ledger.open_trace("q")
    ledger.annotate_node(annotation(t))
    with pytest.raises(LedgerError):
        ledger.annotate_node(annotation(t))


def test_preview_truncated_hash_full():
    ledger = Ledger(preview_bound=64)
    t = ledger.open_trace("q")
    body = "x" * 10_000
    ledger.record_tool_call(record(t, body=body))
    rec = ledger.query_ledger(t, kind="tool_call")[0]
    assert len(rec["result_preview"]) == 64
    assert rec["result_content_hash"] == content_hash(body)


def test_hash_stability():
    assert content_hash("abc") == content_hash(b"abc")
    assert content_hash("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_query_filters_conjunctive():
    ledger = Ledger()
    t = ledger.open_trace("q")
    ledger.record_tool_call(record(t, node="a", tool="t1", outcome="ok"))
    ledger.record_tool_call(record(t, node="a", tool="t2", outcome="error"))
    ledger.record_tool_call(record(t, node="b", tool="t1", outcome="error"))
    assert len(ledger.query_ledger(t, kind="tool_call")) == 3
    assert len(ledger.query_ledger(t, node="a")) == 2
    assert len(ledger.query_ledger(t, node="a", outcome="error")) == 1
    assert len(ledger.query_ledger(t, tool="t1", outcome="ok")) == 1


def test_export_import_round_trip_byte_identical():
    ledger = Ledger()
    t = ledger.open_trace("round trip")
    ledger.record_tool_call(record(t))
    ledger.annotate_node(annotation(t))
    exported = ledger.export_bytes(t)

    other = Ledger()
    other.import_trace(json.loads(exported))
    assert other.export_bytes(t) == exported


def test_persistence_jsonl(tmp_path):
    ledger = Ledger(tmp_path)
    t = ledger.open_trace("persisted")
    ledger.record_tool_call(record(t))
    lines = (tmp_path / f"{t}.jsonl").read_text().splitlines()
    kinds = [json.loads(l)["kind"] for l in lines]
    assert kinds == ["trace_open", "tool_call"]
    index = json.loads((tmp_path / "index.json").read_text())
    assert index[t]["query_text"] == "persisted"
    assert index[t]["file"] == f"{t}.jsonl"


def test_concurrent_appends_keep_total_order():
    ledger = Ledger()
    t = ledger.open_trace("q")

    def work(node):
        for _ in range(50):
            ledger.record_tool_call(record(t, node=node))

    threads = [threading.Thread(target=work, args=(f"n{i}",)) for i in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    records = ledger.query_ledger(t, kind="tool_call")
    assert len(records) == 200
    seqs = [r["seq"] for r in records]
    assert seqs == sorted(seqs) and len(set(seqs)) == 200
