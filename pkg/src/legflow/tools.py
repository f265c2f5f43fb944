"""Tool execution: permitted calls are routed to a pluggable backend.

Backends: fixture replay (exact-match on canonicalized arguments) for
deterministic runs, and thin HTTP clients for the live federal endpoints.
Fault plans intercept a named agent's calls before any backend is touched.
"""
from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol
from urllib.parse import quote

import httpx

URL_PATTERN = re.compile(r"https?://[^\s)\"'<>\]]+")


@dataclass(frozen=True)
class FaultPlan:
    """Force every tool call of one specialist to return a structured error."""

    failed_specialist: str
    error_template: str = "service unavailable: simulated outage of {agent}"

    def error_body(self, tool_name: str) -> str:
        msg = self.error_template.format(agent=self.failed_specialist, tool=tool_name)
        return json.dumps({"error": msg, "tool": tool_name, "source": self.failed_specialist}, sort_keys=True)


@dataclass(frozen=True)
class ToolCall:
    node_id: str
    agent_id: str
    tool_name: str
    arguments: dict
    ordinal: int


@dataclass(frozen=True)
class ToolResult:
    outcome: str  # ok | error
    body: str = ""
    image_path: str | None = None
    urls: tuple[str, ...] = ()
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.outcome == "ok"


class ToolBackend(Protocol):
    def execute(self, tool_name: str, arguments: dict) -> ToolResult: ...


def canonical_arguments(arguments: dict) -> str:
    """Key-sorted, minimal-whitespace JSON; key order never changes the digest."""
    return json.dumps(arguments, sort_keys=True, separators=(",", ":"))


def arguments_digest(arguments: dict) -> str:
    return hashlib.sha256(canonical_arguments(arguments).encode()).hexdigest()


def harvest_urls(text: str) -> tuple[str, ...]:
    return tuple(URL_PATTERN.findall(text or ""))


def error_result(message: str, tool_name: str, elapsed_s: float = 0.0) -> ToolResult:
    body = json.dumps({"error": message, "tool": tool_name}, sort_keys=True)
    return ToolResult(outcome="error", body=body, elapsed_s=elapsed_s)


def dispatch(call: ToolCall, backend: ToolBackend, fault: FaultPlan | None = None) -> ToolResult:
    """Execute one permitted tool call.

    The allowlist decision happens before this point. A fault plan naming the
    call's agent short-circuits to the error template without touching the
    backend. Backend failures become error results, never exceptions: one
    dead data source must not take the pipeline down.
    """
    started = time.monotonic()
    if fault is not None and fault.failed_specialist == call.agent_id:
        return ToolResult(
            outcome="error",
            body=fault.error_body(call.tool_name),
            elapsed_s=time.monotonic() - started,
        )
    try:
        result = backend.execute(call.tool_name, call.arguments)
    except Exception as e:  # noqa: BLE001 - fault-tolerance contract
        return error_result(f"backend failure: {e}", call.tool_name, time.monotonic() - started)
    if result.urls:
        return result
    return ToolResult(
        outcome=result.outcome,
        body=result.body,
        image_path=result.image_path,
        urls=harvest_urls(result.body),
        elapsed_s=time.monotonic() - started,
    )


class FixtureBackend:
    """Exact-match replay of recorded tool results.

    The index maps (tool name, canonical-arguments digest) to a result body
    or a bundled image file. Argument documents differing only in key order
    hit the same fixture.
    """

    def __init__(self, index: dict | str | Path, base_dir: Path | None = None):
        if isinstance(index, (str, Path)):
            path = Path(index)
            doc = json.loads(path.read_text())
            base_dir = base_dir or path.parent
        else:
            doc = index
        self.base_dir = base_dir or Path(".")
        self._entries: dict[tuple[str, str], dict] = {}
        for e in doc.get("entries", []):
            key = (e["tool"], arguments_digest(e.get("args", {})))
            if key in self._entries:
                raise ValueError(f"duplicate fixture key: tool={e['tool']} args={canonical_arguments(e.get('args', {}))}")
            self._entries[key] = e

    def execute(self, tool_name: str, arguments: dict) -> ToolResult:
        key = (tool_name, arguments_digest(arguments))
        entry = self._entries.get(key)
        if entry is None:
            return error_result(
                f"no fixture for call: {tool_name} args-digest {arguments_digest(arguments)[:12]}",
                tool_name,
            )
        result = entry.get("result", {})
        image_file = result.get("image_file")
        image_path = str(self.base_dir / image_file) if image_file else None
        body = result.get("body", "")
        return ToolResult(
            outcome=result.get("outcome", "ok"),
            body=body,
            image_path=image_path,
            urls=tuple(result.get("urls", ())) or harvest_urls(body),
        )


@dataclass
class EndpointTemplate:
    url: str  # with {param} placeholders
    method: str = "GET"
    unsupported: bool = False


class HttpBackend:
    """Thin client over configured endpoint templates, one per tool.

    Honors a minimum per-host spacing between requests; HTTP errors come back
    as structured error results.
    """

    def __init__(
        self,
        catalog: dict[str, EndpointTemplate] | dict | str | Path,
        client: httpx.Client | None = None,
        min_interval_s: float = 0.0,
    ):
        if isinstance(catalog, (str, Path)):
            catalog = json.loads(Path(catalog).read_text())
        templates: dict[str, EndpointTemplate] = {}
        for tool, entry in catalog.items():
            if isinstance(entry, EndpointTemplate):
                templates[tool] = entry
            else:
                templates[tool] = EndpointTemplate(
                    url=entry.get("url", ""),
                    method=entry.get("method", "GET"),
                    unsupported=bool(entry.get("unsupported", False)),
                )
        self.templates = templates
        self._client = client or httpx.Client(timeout=30.0)
        self._min_interval = min_interval_s
        self._last_hit: dict[str, float] = {}
        self._lock = threading.Lock()

    def _respect_rate_limit(self, host: str) -> None:
        if self._min_interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            wait = self._last_hit.get(host, 0.0) + self._min_interval - now
            self._last_hit[host] = max(now, self._last_hit.get(host, 0.0) + self._min_interval)
        if wait > 0:
            time.sleep(wait)

    def execute(self, tool_name: str, arguments: dict) -> ToolResult:
        template = self.templates.get(tool_name)
        if template is None:
            return error_result(f"no endpoint configured for tool {tool_name}", tool_name)
        if template.unsupported:
            return error_result("unsupported in this build", tool_name)
        try:
            url = template.url.format(**{k: quote(str(v), safe="") for k, v in arguments.items()})
        except KeyError as e:
            return error_result(f"missing argument {e} for endpoint template", tool_name)
        host = httpx.URL(url).host or ""
        self._respect_rate_limit(host)
        started = time.monotonic()
        try:
            resp = self._client.request(template.method, url)
        except httpx.HTTPError as e:
            return error_result(f"transport error: {e}", tool_name, time.monotonic() - started)
        elapsed = time.monotonic() - started
        if resp.status_code >= 400:
            body = json.dumps(
                {"error": f"HTTP {resp.status_code}", "tool": tool_name, "body_excerpt": resp.text[:500]},
                sort_keys=True,
            )
            return ToolResult(outcome="error", body=body, elapsed_s=elapsed)
        return ToolResult(outcome="ok", body=resp.text, urls=harvest_urls(resp.text), elapsed_s=elapsed)
