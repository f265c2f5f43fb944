"""Planner loop: drive the backbone model to a valid, compilable plan.

The model sees the specialist catalog and the natural-language routing
guidance, and must answer with a single plan JSON document. Whatever it
returns is parsed, validated, deterministically rewritten, and compile-checked
before anyone downstream sees it; one reprompt is allowed on failure, then the
proposal fails loudly with both raw outputs attached.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from . import gateway
from .gateway import ChatBackend, ChatRequest, Message, Usage
from .leg import (
    PlanParseError,
    PlanSpec,
    QueryFeatures,
    compile_leg,
    extract_features,
    parse_plan,
    rewrite_with_heuristics,
    validate_plan,
)
from .registry import CatalogEntry, Registry


class ArchitectFailure(RuntimeError):
    """Two consecutive attempts produced no usable plan."""

    def __init__(self, message: str, raw_outputs: list[str], usage: Usage):
        super().__init__(message)
        self.raw_outputs = raw_outputs
        self.usage = usage


@dataclass(frozen=True)
class ArchitectRequest:
    query_text: str
    catalog: tuple[CatalogEntry, ...]
    heuristics_text: str
    revision_feedback: str | None = None
    prior_plan: PlanSpec | None = None

    def __post_init__(self) -> None:
        if self.revision_feedback is not None and self.prior_plan is None:
            raise ValueError("revision feedback requires a prior plan")


@dataclass(frozen=True)
class ProposedPlan:
    plan: PlanSpec  # post-rewrite, validates clean
    raw_model_output: str
    rewrite_log: tuple[str, ...]
    usage: Usage
    features: QueryFeatures
    revision: int = 0


PLAN_FORMAT_INSTRUCTION = (
    "Answer with exactly one JSON object and nothing else. Schema: "
    '{"topology": "linear"|"parallel_tracks", '
    '"tracks": [{"goal": "<per-track goal text>", "layers": [["<specialist id>", ...], ...]}], '
    '"rationale": "<one short paragraph>"}. '
    "linear means exactly one track; parallel_tracks means two or more. "
    "Layers run in order; agents within a layer run in parallel. "
    "Use only specialist ids from the catalog."
)


def _build_prompt(req: ArchitectRequest) -> str:
    catalog_doc = json.dumps([c.to_dict() for c in req.catalog], indent=2, sort_keys=True)
    parts = [
        "[plan]",
        f"User query: {req.query_text}",
        "",
        "Specialist catalog:",
        catalog_doc,
        "",
        "Routing guidance:",
        req.heuristics_text,
        "",
        PLAN_FORMAT_INSTRUCTION,
    ]
    if req.prior_plan is not None:
        parts += ["", "Previously proposed plan:", json.dumps(req.prior_plan.to_dict(), sort_keys=True)]
    if req.revision_feedback:
        parts += ["", f"User feedback on that plan: {req.revision_feedback}"]
    return "\n".join(parts)


def _attempt(
    req: ArchitectRequest, raw: str, registry: Registry, patterns: dict | None
) -> tuple[PlanSpec, list[str], QueryFeatures]:
    plan = parse_plan(raw)
    violations = validate_plan(plan, registry)
    if violations:
        raise PlanParseError("plan rejected: " + "; ".join(str(v) for v in violations))
    features = extract_features(req.query_text, patterns)
    plan, applied = rewrite_with_heuristics(plan, features, registry, patterns=patterns)
    post = validate_plan(plan, registry)
    if post:
        raise PlanParseError("rewritten plan rejected: " + "; ".join(str(v) for v in post))
    compile_leg(plan, registry)  # compile check only
    return plan, applied, features


def propose_plan(
    req: ArchitectRequest,
    model: ChatBackend,
    registry: Registry,
    patterns: dict | None = None,
    revision: int = 0,
) -> ProposedPlan:
    """Ask the model for a plan; validate, rewrite, compile-check.

    One reprompt on failure, with the failure appended, then
    :class:`ArchitectFailure`. Usage accumulates across attempts.
    """
    if not req.catalog:
        raise ValueError("catalog is empty")
    prompt = _build_prompt(req)
    usage = Usage()
    raw_outputs: list[str] = []
    messages = [Message.text("user", prompt)]
    for attempt in range(2):
        resp = model.chat(
            ChatRequest(stage=gateway.ARCHITECT, system="", messages=tuple(messages))
        )
        usage = usage + resp.usage
        raw_outputs.append(resp.content)
        try:
            plan, applied, features = _attempt(req, resp.content, registry, patterns)
        except PlanParseError as e:
            if attempt == 0:
                messages.append(Message.text("assistant", resp.content))
                messages.append(
                    Message.text("user", f"That plan was rejected ({e}). {PLAN_FORMAT_INSTRUCTION}")
                )
                continue
            raise ArchitectFailure(f"no valid plan after 2 attempts: {e}", raw_outputs, usage) from e
        return ProposedPlan(
            plan=plan,
            raw_model_output=resp.content,
            rewrite_log=tuple(applied),
            usage=usage,
            features=features,
            revision=revision,
        )
    raise ArchitectFailure("unreachable", raw_outputs, usage)


def revise_plan(
    req: ArchitectRequest,
    model: ChatBackend,
    registry: Registry,
    patterns: dict | None = None,
    prior_revision: int = 0,
) -> ProposedPlan:
    """Same contract as propose_plan, with the prior plan and feedback in the prompt."""
    if req.prior_plan is None:
        raise ValueError("revise_plan requires a prior plan")
    if req.revision_feedback is None or not req.revision_feedback.strip():
        raise ValueError("empty revision")
    return propose_plan(req, model, registry, patterns, revision=prior_revision + 1)
