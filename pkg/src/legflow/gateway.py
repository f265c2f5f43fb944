"""Uniform chat-with-tools backend contract.

Two families of backends sit behind one ``chat()`` surface: thin HTTP clients
for OpenAI- and Anthropic-style APIs, and a deterministic scripted backend
that replays canned exchanges for tests, benchmarks, and ablations. All token
accounting flows through here; counts are provider-reported, never locally
tokenized.
"""
from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Protocol

import httpx

ARCHITECT = "architect"
SPECIALIST = "specialist"
CONSOLIDATOR = "consolidator"
REPORTER = "reporter"
STAGES = (ARCHITECT, SPECIALIST, CONSOLIDATOR, REPORTER)


class GatewayError(RuntimeError):
    pass


class UnscriptedExchange(GatewayError):
    """The scripted backend had no entry for an incoming request."""


@dataclass(frozen=True)
class Usage:
    input_tokens: int = 0
    output_tokens: int = 0

    def __post_init__(self) -> None:
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValueError("token counts must be non-negative")

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(self.input_tokens + other.input_tokens, self.output_tokens + other.output_tokens)

    @property
    def total(self) -> int:
        return self.input_tokens + self.output_tokens

    def to_dict(self) -> dict:
        return {"input_tokens": self.input_tokens, "output_tokens": self.output_tokens}


@dataclass(frozen=True)
class ToolCallRequest:
    name: str
    arguments: dict


@dataclass(frozen=True)
class MessagePart:
    """One content part: plain text, or an image attachment by file path."""

    kind: str  # text | image
    text: str = ""
    image_path: str = ""


@dataclass(frozen=True)
class Message:
    role: str  # user | assistant | tool
    parts: tuple[MessagePart, ...]

    @staticmethod
    def text(role: str, text: str) -> "Message":
        return Message(role=role, parts=(MessagePart("text", text=text),))


@dataclass(frozen=True)
class ChatRequest:
    stage: str
    system: str
    messages: tuple[Message, ...]
    tools: tuple[dict, ...] = ()
    model_id: str = ""

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.tools and self.stage != SPECIALIST:
            raise ValueError("tools may only be offered at the specialist stage")

    def rendered_text(self) -> str:
        """Canonical flat rendering used for scripted matching and digests."""
        parts = [f"stage={self.stage}", f"system={self.system}"]
        rounds = sum(1 for m in self.messages if m.role == "tool")
        parts.append(f"rounds={rounds}")
        for m in self.messages:
            for p in m.parts:
                if p.kind == "text":
                    parts.append(f"{m.role}: {p.text}")
                else:
                    parts.append(f"{m.role}: [image {Path(p.image_path).name}]")
        return "\n".join(parts)

    def has_images(self) -> bool:
        return any(p.kind == "image" for m in self.messages for p in m.parts)


@dataclass(frozen=True)
class ChatResponse:
    content: str
    tool_calls: tuple[ToolCallRequest, ...] = ()
    usage: Usage = Usage()


class ChatBackend(Protocol):
    def chat(self, req: ChatRequest) -> ChatResponse: ...


# ---------------------------------------------------------------------------
# Usage accounting
# ---------------------------------------------------------------------------


class UsageLedger:
    """Per-stage and grand token totals; accumulation is order-independent."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._by_stage: dict[str, Usage] = {}

    def accumulate(self, stage: str, usage: Usage) -> None:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        with self._lock:
            self._by_stage[stage] = self._by_stage.get(stage, Usage()) + usage

    def by_stage(self) -> dict[str, Usage]:
        with self._lock:
            return dict(self._by_stage)

    def total(self) -> Usage:
        total = Usage()
        for u in self.by_stage().values():
            total = total + u
        return total

    def merge(self, other: "UsageLedger") -> None:
        for stage, usage in other.by_stage().items():
            self.accumulate(stage, usage)

    def to_dict(self) -> dict:
        return {stage: u.to_dict() for stage, u in sorted(self.by_stage().items())}


# ---------------------------------------------------------------------------
# Scripted backend
# ---------------------------------------------------------------------------


@dataclass
class ScriptEntry:
    stage: str
    ordinal: int | None = None
    pattern: str | None = None
    content: str = ""
    tool_calls: tuple[ToolCallRequest, ...] = ()
    usage: Usage = Usage()
    repeatable: bool = False
    consumed: bool = False

    def matches(self, req: ChatRequest, stage_ordinal: int, rendered: str) -> bool:
        if self.stage != req.stage:
            return False
        if self.ordinal is not None:
            return self.ordinal == stage_ordinal
        if self.pattern is not None:
            return re.search(self.pattern, rendered, re.DOTALL) is not None
        return True


class ScriptedBackend:
    """Replays a scenario script: deterministic stand-in for a live model.

    Entries match on stage plus either a per-stage ordinal or a regex over
    the request's canonical rendering. Each entry is consumed at most once
    unless marked repeatable. Consumption is serialized so concurrent
    specialist calls cannot double-spend an entry.
    """

    def __init__(self, script: dict | str | Path):
        doc = _load_json_source(script)
        self.entries: list[ScriptEntry] = []
        seen_keys: set[tuple] = set()
        for i, e in enumerate(doc.get("exchanges", [])):
            match = e.get("match", {})
            respond = e.get("respond", {})
            stage = match.get("stage")
            if stage not in STAGES:
                raise GatewayError(f"script entry {i}: unknown stage {stage!r}")
            ordinal = match.get("ordinal")
            pattern = match.get("pattern")
            key = (stage, ordinal, pattern)
            if key in seen_keys:
                raise GatewayError(f"script entry {i}: duplicate ambiguous matcher {key!r}")
            seen_keys.add(key)
            usage_doc = respond.get("usage", {})
            calls = tuple(
                ToolCallRequest(name=c["name"], arguments=c.get("arguments", {}))
                for c in respond.get("tool_calls", [])
            )
            self.entries.append(
                ScriptEntry(
                    stage=stage,
                    ordinal=ordinal,
                    pattern=pattern,
                    content=respond.get("content", ""),
                    tool_calls=calls,
                    usage=Usage(usage_doc.get("input_tokens", 0), usage_doc.get("output_tokens", 0)),
                    repeatable=bool(e.get("repeatable", False)),
                )
            )
        self._lock = threading.Lock()
        self._stage_counts: dict[str, int] = {}
        self.requests: list[ChatRequest] = []  # kept for assertions in tests

    def chat(self, req: ChatRequest) -> ChatResponse:
        rendered = req.rendered_text()
        with self._lock:
            self.requests.append(req)
            ordinal = self._stage_counts.get(req.stage, 0)
            self._stage_counts[req.stage] = ordinal + 1
            for entry in self.entries:
                if entry.consumed and not entry.repeatable:
                    continue
                if entry.matches(req, ordinal, rendered):
                    entry.consumed = True
                    return ChatResponse(content=entry.content, tool_calls=entry.tool_calls, usage=entry.usage)
        raise UnscriptedExchange(
            f"unscripted exchange: stage={req.stage} step={ordinal} "
            f"(request starts: {rendered[:120]!r})"
        )


def scripted_backend(script: dict | str | Path) -> ScriptedBackend:
    return ScriptedBackend(script)


def _load_json_source(source: dict | str | Path) -> dict:
    if isinstance(source, dict):
        return source
    if isinstance(source, Path):
        return json.loads(source.read_text())
    p = Path(source)
    if p.exists():
        return json.loads(p.read_text())
    return json.loads(source)


# ---------------------------------------------------------------------------
# HTTP providers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    dialect: str  # openai | anthropic
    model_id: str
    api_key_env: str = ""
    supports_images: bool = True
    timeout_s: float = 120.0
    max_attempts: int = 3


def _encode_image(path: str) -> str:
    import base64

    return base64.b64encode(Path(path).read_bytes()).decode("ascii")


def build_openai_payload(req: ChatRequest, model_id: str) -> dict:
    messages: list[dict] = []
    if req.system:
        messages.append({"role": "system", "content": req.system})
    for m in req.messages:
        if all(p.kind == "text" for p in m.parts):
            messages.append({"role": m.role if m.role != "tool" else "user", "content": "\n".join(p.text for p in m.parts)})
        else:
            content = []
            for p in m.parts:
                if p.kind == "text":
                    content.append({"type": "text", "text": p.text})
                else:
                    content.append(
                        {"type": "image_url", "image_url": {"url": f"data:image/png;base64,{_encode_image(p.image_path)}"}}
                    )
            messages.append({"role": m.role, "content": content})
    payload: dict[str, Any] = {"model": model_id, "messages": messages}
    if req.tools:
        payload["tools"] = [{"type": "function", "function": t} if "function" not in t else t for t in req.tools]
    return payload


def parse_openai_response(doc: dict) -> ChatResponse:
    choice = doc["choices"][0]["message"]
    calls = []
    for c in choice.get("tool_calls") or []:
        fn = c.get("function", {})
        args = fn.get("arguments", "{}")
        calls.append(ToolCallRequest(name=fn.get("name", ""), arguments=json.loads(args) if isinstance(args, str) else args))
    usage = doc.get("usage", {})
    return ChatResponse(
        content=choice.get("content") or "",
        tool_calls=tuple(calls),
        usage=Usage(usage.get("prompt_tokens", 0), usage.get("completion_tokens", 0)),
    )


def build_anthropic_payload(req: ChatRequest, model_id: str) -> dict:
    messages = []
    for m in req.messages:
        content = []
        for p in m.parts:
            if p.kind == "text":
                content.append({"type": "text", "text": p.text})
            else:
                content.append(
                    {
                        "type": "image",
                        "source": {"type": "base64", "media_type": "image/png", "data": _encode_image(p.image_path)},
                    }
                )
        messages.append({"role": "user" if m.role == "tool" else m.role, "content": content})
    payload: dict[str, Any] = {"model": model_id, "max_tokens": 4096, "messages": messages}
    if req.system:
        payload["system"] = req.system
    if req.tools:
        payload["tools"] = [
            {"name": t.get("name"), "description": t.get("description", ""), "input_schema": t.get("parameters", {})}
            for t in req.tools
        ]
    return payload


def parse_anthropic_response(doc: dict) -> ChatResponse:
    text_parts = []
    calls = []
    for block in doc.get("content", []):
        if block.get("type") == "text":
            text_parts.append(block.get("text", ""))
        elif block.get("type") == "tool_use":
            calls.append(ToolCallRequest(name=block.get("name", ""), arguments=block.get("input", {})))
    usage = doc.get("usage", {})
    return ChatResponse(
        content="".join(text_parts),
        tool_calls=tuple(calls),
        usage=Usage(usage.get("input_tokens", 0), usage.get("output_tokens", 0)),
    )


class HttpChatBackend:
    """Chat client for OpenAI- or Anthropic-style endpoints with bounded retry."""

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None):
        if config.dialect not in ("openai", "anthropic"):
            raise GatewayError(f"unknown dialect {config.dialect!r}")
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout_s)

    def _headers(self) -> dict:
        import os

        key = os.environ.get(self.config.api_key_env, "") if self.config.api_key_env else ""
        if self.config.dialect == "anthropic":
            return {"x-api-key": key, "anthropic-version": "2023-06-01"}
        return {"Authorization": f"Bearer {key}"}

    def _url(self) -> str:
        base = self.config.endpoint.rstrip("/")
        return f"{base}/v1/messages" if self.config.dialect == "anthropic" else f"{base}/chat/completions"

    def chat(self, req: ChatRequest) -> ChatResponse:
        if req.has_images() and not self.config.supports_images:
            raise GatewayError("multimodal unsupported by provider")
        model_id = req.model_id or self.config.model_id
        if self.config.dialect == "anthropic":
            payload = build_anthropic_payload(req, model_id)
        else:
            payload = build_openai_payload(req, model_id)
        last_error: Exception | None = None
        for attempt in range(self.config.max_attempts):
            try:
                resp = self._client.post(self._url(), json=payload, headers=self._headers())
                if resp.status_code in (429, 500, 502, 503, 504):
                    raise GatewayError(f"retriable provider status {resp.status_code}")
                resp.raise_for_status()
                doc = resp.json()
                if self.config.dialect == "anthropic":
                    return parse_anthropic_response(doc)
                return parse_openai_response(doc)
            except (httpx.HTTPError, GatewayError) as e:
                last_error = e
                if attempt < self.config.max_attempts - 1:
                    time.sleep(min(2**attempt * 0.5, 8.0))
        raise GatewayError(f"chat failed after {self.config.max_attempts} attempts: {last_error}")
