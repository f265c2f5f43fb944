"""Append-only provenance ledger.

Every run opens a trace; every tool call and node execution appends one
record under that trace id. Records persist as one JSONL file per trace so
the audit trail stays greppable and diffable. Appends are serialized into a
total order; nothing is ever mutated or deleted.
"""
from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_PREVIEW_BOUND = 2048


class LedgerError(ValueError):
    pass


def content_hash(body: bytes | str) -> str:
    data = body.encode() if isinstance(body, str) else body
    return hashlib.sha256(data).hexdigest()


def _clip(text: str, bound: int) -> str:
    return text if len(text) <= bound else text[:bound]


@dataclass(frozen=True)
class ToolCallRecord:
    trace_id: str
    node_id: str
    tool_name: str
    arguments_digest: str
    arguments_preview: str
    started_at: float
    duration_s: float
    result_content_hash: str
    result_preview: str
    harvested_urls: tuple[str, ...]
    outcome: str

    def to_dict(self) -> dict:
        return {
            "kind": "tool_call",
            "trace_id": self.trace_id,
            "node_id": self.node_id,
            "tool_name": self.tool_name,
            "arguments_digest": self.arguments_digest,
            "arguments_preview": self.arguments_preview,
            "started_at": self.started_at,
            "duration_s": self.duration_s,
            "result_content_hash": self.result_content_hash,
            "result_preview": self.result_preview,
            "harvested_urls": list(self.harvested_urls),
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class NodeAnnotation:
    trace_id: str
    node_id: str
    stage: str
    inputs_digest: str
    output_digest: str
    started_at: float
    duration_s: float

    def to_dict(self) -> dict:
        return {
            "kind": "node",
            "trace_id": self.trace_id,
            "node_id": self.node_id,
            "stage": self.stage,
            "inputs_digest": self.inputs_digest,
            "output_digest": self.output_digest,
            "started_at": self.started_at,
            "duration_s": self.duration_s,
        }


@dataclass
class _Trace:
    trace_id: str
    query_text: str
    opened_at: float
    records: list[dict] = field(default_factory=list)
    annotated_nodes: set[str] = field(default_factory=set)


class Ledger:
    """Trace store. ``directory=None`` keeps everything in memory (tests)."""

    def __init__(self, directory: str | Path | None = None, preview_bound: int = DEFAULT_PREVIEW_BOUND):
        self.directory = Path(directory) if directory else None
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)
        self.preview_bound = preview_bound
        self._traces: dict[str, _Trace] = {}
        self._lock = threading.Lock()
        self._seq = 0

    # -- trace lifecycle ----------------------------------------------------

    def open_trace(self, query_text: str, trace_id: str | None = None) -> str:
        tid = trace_id or str(uuid.uuid4())
        with self._lock:
            if tid in self._traces:
                raise LedgerError(f"trace already open: {tid}")
            trace = _Trace(trace_id=tid, query_text=query_text, opened_at=time.time())
            self._traces[tid] = trace
            self._append_locked(
                trace,
                {"kind": "trace_open", "trace_id": tid, "query_text": query_text, "at": trace.opened_at},
            )
            if self.directory:
                self._write_index_locked()
        return tid

    def _write_index_locked(self) -> None:
        index = {
            tid: {"query_text": t.query_text, "opened_at": t.opened_at, "file": f"{tid}.jsonl"}
            for tid, t in self._traces.items()
        }
        (self.directory / "index.json").write_text(json.dumps(index, indent=1, sort_keys=True) + "\n")

    def _trace(self, trace_id: str) -> _Trace:
        trace = self._traces.get(trace_id)
        if trace is None:
            raise LedgerError(f"unknown trace: {trace_id}")
        return trace

    def _append_locked(self, trace: _Trace, record: dict) -> None:
        self._seq += 1
        record = dict(record)
        record["seq"] = self._seq
        trace.records.append(record)
        if self.directory:
            path = self.directory / f"{trace.trace_id}.jsonl"
            with path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(record, sort_keys=True) + "\n")

    # -- appends --------------------------------------------------------------

    def record_tool_call(self, record: ToolCallRecord) -> None:
        with self._lock:
            trace = self._trace(record.trace_id)
            doc = record.to_dict()
            doc["arguments_preview"] = _clip(doc["arguments_preview"], self.preview_bound)
            doc["result_preview"] = _clip(doc["result_preview"], self.preview_bound)
            self._append_locked(trace, doc)

    def annotate_node(self, annotation: NodeAnnotation) -> None:
        with self._lock:
            trace = self._trace(annotation.trace_id)
            if annotation.node_id in trace.annotated_nodes:
                raise LedgerError(f"node already annotated: {annotation.node_id}")
            trace.annotated_nodes.add(annotation.node_id)
            self._append_locked(trace, annotation.to_dict())

    # -- queries --------------------------------------------------------------

    def query_text(self, trace_id: str) -> str:
        with self._lock:
            return self._trace(trace_id).query_text

    def trace_ids(self) -> list[str]:
        with self._lock:
            return list(self._traces)

    def query_ledger(
        self,
        trace_id: str,
        node: str | None = None,
        tool: str | None = None,
        outcome: str | None = None,
        since: float | None = None,
        until: float | None = None,
        kind: str | None = None,
    ) -> list[dict]:
        """Conjunctive filter over a trace's records, in append order."""
        with self._lock:
            records = list(self._trace(trace_id).records)
        out = []
        for r in records:
            if kind is not None and r.get("kind") != kind:
                continue
            if node is not None and r.get("node_id") != node:
                continue
            if tool is not None and r.get("tool_name") != tool:
                continue
            if outcome is not None and r.get("outcome") != outcome:
                continue
            at = r.get("started_at", r.get("at"))
            if since is not None and (at is None or at < since):
                continue
            if until is not None and (at is None or at > until):
                continue
            out.append(r)
        return out

    def export_trace(self, trace_id: str) -> dict:
        """Lossless portable document: header plus every record, in order."""
        with self._lock:
            trace = self._trace(trace_id)
            return {
                "header": {
                    "trace_id": trace.trace_id,
                    "query_text": trace.query_text,
                    "opened_at": trace.opened_at,
                },
                "records": [dict(r) for r in trace.records],
            }

    def import_trace(self, document: dict) -> str:
        header = document.get("header", {})
        tid = header.get("trace_id")
        if not tid:
            raise LedgerError("export document has no trace id")
        with self._lock:
            if tid in self._traces:
                raise LedgerError(f"trace already present: {tid}")
            trace = _Trace(
                trace_id=tid,
                query_text=header.get("query_text", ""),
                opened_at=header.get("opened_at", 0.0),
            )
            trace.records = [dict(r) for r in document.get("records", [])]
            for r in trace.records:
                if r.get("kind") == "node":
                    trace.annotated_nodes.add(r.get("node_id", ""))
            self._traces[tid] = trace
        return tid

    def export_bytes(self, trace_id: str) -> bytes:
        return json.dumps(self.export_trace(trace_id), sort_keys=True).encode()

    # -- helpers for recording ------------------------------------------------

    def record_dispatch(
        self,
        trace_id: str,
        node_id: str,
        tool_name: str,
        arguments: dict,
        outcome: str,
        body: str,
        urls: tuple[str, ...],
        started_at: float,
        duration_s: float,
    ) -> None:
        from .tools import arguments_digest, canonical_arguments

        self.record_tool_call(
            ToolCallRecord(
                trace_id=trace_id,
                node_id=node_id,
                tool_name=tool_name,
                arguments_digest=arguments_digest(arguments),
                arguments_preview=canonical_arguments(arguments),
                started_at=started_at,
                duration_s=duration_s,
                result_content_hash=content_hash(body),
                result_preview=body,
                harvested_urls=urls,
                outcome=outcome,
            )
        )
