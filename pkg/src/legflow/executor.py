"""Layer-by-layer execution of a compiled graph.

Tracks run their layers in order behind a barrier: nothing in layer k+1
starts until every node of layer k has produced a brief. Specialists inside
a layer may run in parallel (configurable width); correctness never depends
on that parallelism. Between layers, fusion nodes (consolidator / image)
compact the context; after all tracks finish, the cross-track merge folds the
track briefs and the reporter writes the final answer.

Ablation variants intercept exactly one component and leave the rest alone:
``fixed_graph`` is handled by the caller passing ``static_leg()``;
``no_consolidation`` replaces every fusion with raw concatenation and lets
context accumulate; ``no_reporter`` returns the merged brief verbatim.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from . import gateway
from .gateway import ChatBackend, ChatRequest, Message, MessagePart, Usage, UsageLedger
from .leg import (
    K_CONSOLIDATOR,
    K_IMAGE,
    K_MERGE,
    K_REPORTER,
    K_SPECIALIST,
    LINEAR,
    LayerSpec,
    Leg,
    LegNode,
    PlanSpec,
    TrackSpec,
    compile_leg,
)
from .provenance import Ledger, NodeAnnotation, content_hash
from .registry import AgentSpec, Registry, check_allowlist
from .tools import FaultPlan, ToolBackend, ToolCall, dispatch

VARIANT_FULL = "full"
VARIANT_FIXED_GRAPH = "fixed_graph"
VARIANT_NO_CONSOLIDATION = "no_consolidation"
VARIANT_NO_REPORTER = "no_reporter"
VARIANTS = (VARIANT_FULL, VARIANT_FIXED_GRAPH, VARIANT_NO_CONSOLIDATION, VARIANT_NO_REPORTER)

DEFAULT_ROUND_CAP = 8

STATIC_LEG_LAYERS = (("nhc",), ("noaa_coops", "usgs"), ("fema",))

EventCallback = Callable[[str, dict], None]


@dataclass(frozen=True)
class Brief:
    """The running consolidated context block flowing between layers."""

    text: str
    producer_node: str
    source_briefs: tuple[str, ...] = ()
    usage: Usage = Usage()
    images: tuple[str, ...] = ()
    errored: bool = False


@dataclass
class RunResult:
    final_text: str
    per_node_outputs: dict[str, Brief]
    trace_id: str
    variant: str
    node_durations: dict[str, float]
    wall_clock_s: float
    usage_by_stage: dict[str, Usage]
    failed: bool = False
    error: str | None = None

    @property
    def usage_total(self) -> Usage:
        total = Usage()
        for u in self.usage_by_stage.values():
            total = total + u
        return total

    def stage_text(self, kind: str, leg: Leg) -> str:
        """Concatenated output text of every node of the given kind."""
        chunks = []
        for node in leg.nodes:
            if node.kind == kind and node.node_id in self.per_node_outputs:
                chunks.append(self.per_node_outputs[node.node_id].text)
        return "\n\n".join(chunks)


def static_leg(registry: Registry) -> Leg:
    """The fixed three-layer pipeline used by the fixed-graph ablation."""
    missing = [aid for layer in STATIC_LEG_LAYERS for aid in layer if aid not in registry.agents]
    if missing:
        raise ValueError(f"static leg requires specialists missing from registry: {missing}")
    plan = PlanSpec(
        topology=LINEAR,
        tracks=(
            TrackSpec(
                goal_text="",
                layers=tuple(LayerSpec(agent_ids=layer) for layer in STATIC_LEG_LAYERS),
            ),
        ),
    )
    return compile_leg(plan, registry)


def _concat_with_headers(briefs: list[Brief]) -> str:
    return "\n\n".join(f"## {b.producer_node}\n{b.text}" for b in briefs)


@dataclass
class Executor:
    registry: Registry
    model: ChatBackend
    tools: ToolBackend
    ledger: Ledger
    round_cap: int = DEFAULT_ROUND_CAP
    width: int = 1
    on_event: EventCallback | None = None

    def _emit(self, event_kind: str, **payload) -> None:
        if self.on_event is not None:
            self.on_event(event_kind, payload)

    # -- node helpers ---------------------------------------------------------

    def _annotate(self, trace_id: str, node: LegNode, stage: str, inputs: str, output: str, started: float) -> None:
        self.ledger.annotate_node(
            NodeAnnotation(
                trace_id=trace_id,
                node_id=node.node_id,
                stage=stage,
                inputs_digest=content_hash(inputs),
                output_digest=content_hash(output),
                started_at=started,
                duration_s=time.time() - started,
            )
        )

    def run_specialist(
        self,
        node: LegNode,
        context_brief: Brief | None,
        goal: str,
        trace_id: str,
        usage: UsageLedger,
        fault: FaultPlan | None = None,
        track_goal: str = "",
    ) -> Brief:
        """Tool-calling loop for one specialist node.

        Allowlist denials and tool errors are surfaced to the model as tool
        results and never crash the loop; a specialist whose every call fails
        still emits a brief stating the failure.
        """
        agent: AgentSpec = self.registry.agent(node.agent_id)
        if agent.kind != "specialist":
            raise ValueError(f"{node.agent_id} is not a specialist")
        prompt_lines = [f"[node {node.node_id}]", f"Goal: {goal}"]
        if track_goal and track_goal != goal:
            prompt_lines.append(f"Track goal: {track_goal}")
        if context_brief is not None and context_brief.text:
            prompt_lines += ["", "Accumulated context:", context_brief.text]
        messages: list[Message] = [Message.text("user", "\n".join(prompt_lines))]
        images: list[str] = []
        node_usage = Usage()
        started = time.time()
        final = ""
        any_ok_result = False
        any_result = False
        last_error = ""
        rounds = 0
        while rounds < self.round_cap:
            rounds += 1
            resp = self.model.chat(
                ChatRequest(
                    stage=gateway.SPECIALIST,
                    system=agent.system_prompt,
                    messages=tuple(messages),
                    tools=agent.tool_schemas,
                )
            )
            usage.accumulate(gateway.SPECIALIST, resp.usage)
            node_usage = node_usage + resp.usage
            if not resp.tool_calls:
                final = resp.content
                break
            call_lines = [f"requested tool {c.name} with {c.arguments}" for c in resp.tool_calls]
            messages.append(Message.text("assistant", "\n".join(call_lines)))
            for ordinal, tc in enumerate(resp.tool_calls):
                decision = check_allowlist(self.registry, agent.id, tc.name)
                call_started = time.time()
                if decision.denied:
                    body = f'{{"error": "tool {tc.name} not allowlisted for agent {agent.id}"}}'
                    self.ledger.record_dispatch(
                        trace_id, node.node_id, tc.name, tc.arguments, "denied", body, (), call_started, 0.0
                    )
                    self._emit("tool_call", node_id=node.node_id, tool=tc.name, outcome="denied")
                    messages.append(Message.text("tool", f"[{tc.name}] {body}"))
                    last_error = body
                    any_result = True
                    continue
                result = dispatch(
                    ToolCall(
                        node_id=node.node_id,
                        agent_id=agent.id,
                        tool_name=tc.name,
                        arguments=tc.arguments,
                        ordinal=ordinal,
                    ),
                    self.tools,
                    fault,
                )
                self.ledger.record_dispatch(
                    trace_id,
                    node.node_id,
                    tc.name,
                    tc.arguments,
                    result.outcome,
                    result.body,
                    result.urls,
                    call_started,
                    result.elapsed_s,
                )
                self._emit("tool_call", node_id=node.node_id, tool=tc.name, outcome=result.outcome)
                any_result = True
                if result.ok:
                    any_ok_result = True
                else:
                    last_error = result.body
                if result.image_path:
                    images.append(result.image_path)
                    messages.append(Message.text("tool", f"[{tc.name}] produced image {result.image_path}"))
                else:
                    messages.append(Message.text("tool", f"[{tc.name}] {result.body}"))
        else:
            final = f"NOTE: tool round cap ({self.round_cap}) reached before a final answer was produced."
        if not final.strip() and any_result and not any_ok_result:
            final = f"DATA UNAVAILABLE: {agent.id}: {last_error}"
        brief = Brief(
            text=final,
            producer_node=node.node_id,
            usage=node_usage,
            images=tuple(images),
            errored=not final.strip(),
        )
        self._annotate(
            trace_id,
            node,
            gateway.SPECIALIST,
            inputs="\n".join(p.text for m in messages[:1] for p in m.parts),
            output=final,
            started=started,
        )
        return brief

    def consolidate(
        self,
        briefs: list[Brief],
        node: LegNode,
        goal: str,
        trace_id: str,
        usage: UsageLedger,
        variant: str = VARIANT_FULL,
    ) -> Brief:
        """Fuse a layer's briefs into one block that subsumes them downstream.

        One input brief is passed through untouched (no model call). Under
        the no-consolidation variant the fusion is raw concatenation with
        node-id headers.
        """
        if not briefs:
            raise ValueError("consolidate requires at least one brief")
        started = time.time()
        sources = tuple(b.producer_node for b in briefs)
        if len(briefs) == 1 and variant != VARIANT_NO_CONSOLIDATION:
            out = Brief(
                text=briefs[0].text,
                producer_node=node.node_id,
                source_briefs=sources,
                images=briefs[0].images,
            )
            self._annotate(trace_id, node, gateway.CONSOLIDATOR, briefs[0].text, out.text, started)
            self._emit("consolidated", node_id=node.node_id, sources=list(sources), passthrough=True)
            return out
        joined = _concat_with_headers(briefs)
        if variant == VARIANT_NO_CONSOLIDATION:
            out = Brief(text=joined, producer_node=node.node_id, source_briefs=sources)
            self._annotate(trace_id, node, gateway.CONSOLIDATOR, joined, out.text, started)
            self._emit("consolidated", node_id=node.node_id, sources=list(sources), raw_concat=True)
            return out
        agent = self.registry.agent(node.agent_id)
        prompt = f"[consolidate {node.node_id}]\nGoal: {goal}\n\nBriefs to fuse:\n{joined}"
        resp = self.model.chat(
            ChatRequest(
                stage=gateway.CONSOLIDATOR,
                system=agent.system_prompt,
                messages=(Message.text("user", prompt),),
            )
        )
        usage.accumulate(gateway.CONSOLIDATOR, resp.usage)
        out = Brief(text=resp.content, producer_node=node.node_id, source_briefs=sources, usage=resp.usage)
        self._annotate(trace_id, node, gateway.CONSOLIDATOR, joined, out.text, started)
        self._emit("consolidated", node_id=node.node_id, sources=list(sources))
        return out

    def interpret_images(
        self,
        briefs: list[Brief],
        node: LegNode,
        goal: str,
        trace_id: str,
        usage: UsageLedger,
    ) -> Brief:
        """Feed upstream images plus their briefs to the vision-capable agent.

        The narrative it returns replaces the raw images downstream; usage is
        attributed to the consolidator stage.
        """
        started = time.time()
        agent = self.registry.agent(node.agent_id)
        sources = tuple(b.producer_node for b in briefs)
        joined = _concat_with_headers(briefs)
        parts: list[MessagePart] = [
            MessagePart("text", f"[image {node.node_id}]\nGoal: {goal}\n\nUpstream briefs:\n{joined}")
        ]
        for b in briefs:
            for path in b.images:
                parts.append(MessagePart("image", image_path=path))
        resp = self.model.chat(
            ChatRequest(
                stage=gateway.CONSOLIDATOR,
                system=agent.system_prompt,
                messages=(Message(role="user", parts=tuple(parts)),),
            )
        )
        usage.accumulate(gateway.CONSOLIDATOR, resp.usage)
        out = Brief(text=resp.content, producer_node=node.node_id, source_briefs=sources, usage=resp.usage)
        self._annotate(trace_id, node, gateway.CONSOLIDATOR, joined, out.text, started)
        self._emit("consolidated", node_id=node.node_id, sources=list(sources), image=True)
        return out

    def cross_track_merge(
        self,
        track_briefs: list[Brief],
        node: LegNode,
        goal: str,
        trace_id: str,
        usage: UsageLedger,
        variant: str = VARIANT_FULL,
    ) -> Brief:
        """Fold per-track briefs into one shared block for the reporter."""
        if len(track_briefs) < 2:
            raise ValueError("cross_track_merge requires at least two track briefs")
        started = time.time()
        sources = tuple(b.producer_node for b in track_briefs)
        joined = "\n\n".join(f"### Track {i}\n{b.text}" for i, b in enumerate(track_briefs))
        if variant == VARIANT_NO_CONSOLIDATION:
            out = Brief(text=joined, producer_node=node.node_id, source_briefs=sources)
            self._annotate(trace_id, node, gateway.CONSOLIDATOR, joined, out.text, started)
            self._emit("merged", node_id=node.node_id, raw_concat=True)
            return out
        agent = self.registry.agent(node.agent_id)
        prompt = f"[merge {node.node_id}]\nGoal: {goal}\n\nTrack briefs:\n{joined}"
        resp = self.model.chat(
            ChatRequest(
                stage=gateway.CONSOLIDATOR,
                system=agent.system_prompt,
                messages=(Message.text("user", prompt),),
            )
        )
        usage.accumulate(gateway.CONSOLIDATOR, resp.usage)
        out = Brief(text=resp.content, producer_node=node.node_id, source_briefs=sources, usage=resp.usage)
        self._annotate(trace_id, node, gateway.CONSOLIDATOR, joined, out.text, started)
        self._emit("merged", node_id=node.node_id)
        return out

    def report(
        self,
        merged: Brief,
        goal: str,
        node: LegNode,
        trace_id: str,
        usage: UsageLedger,
    ) -> str:
        started = time.time()
        agent = self.registry.agent(node.agent_id)
        prompt = f"[report {node.node_id}]\nGoal: {goal}\n\nConsolidated material:\n{merged.text}"
        resp = self.model.chat(
            ChatRequest(
                stage=gateway.REPORTER,
                system=agent.system_prompt,
                messages=(Message.text("user", prompt),),
            )
        )
        usage.accumulate(gateway.REPORTER, resp.usage)
        self._annotate(trace_id, node, gateway.REPORTER, merged.text, resp.content, started)
        self._emit("reported", node_id=node.node_id)
        return resp.content

    # -- track and run orchestration -------------------------------------------

    def _run_track(
        self,
        leg: Leg,
        track_index: int,
        goal: str,
        trace_id: str,
        usage: UsageLedger,
        variant: str,
        fault: FaultPlan | None,
        outputs: dict[str, Brief],
        durations: dict[str, float],
    ) -> Brief:
        track_goal = leg.plan.tracks[track_index].goal_text
        running: Brief | None = None
        accumulated: list[Brief] = []  # no_consolidation keeps every brief alive
        pending: list[tuple[LegNode, Brief]] = []  # layer awaiting its fusion node(s)
        for group in leg.layers_of_track(track_index):
            kinds = {n.kind for n in group}
            if kinds == {K_SPECIALIST}:
                context = running
                if variant == VARIANT_NO_CONSOLIDATION and accumulated:
                    context = Brief(text=_concat_with_headers(accumulated), producer_node="accumulated")
                briefs: list[Brief | None] = [None] * len(group)

                def _one(i_node: tuple[int, LegNode]) -> tuple[int, Brief]:
                    i, node = i_node
                    self._emit("node_started", node_id=node.node_id, kind=node.kind)
                    t0 = time.time()
                    b = self.run_specialist(node, context, goal, trace_id, usage, fault, track_goal)
                    durations[node.node_id] = time.time() - t0
                    self._emit("node_finished", node_id=node.node_id, kind=node.kind)
                    return i, b

                if self.width > 1 and len(group) > 1:
                    with ThreadPoolExecutor(max_workers=self.width) as pool:
                        for i, b in pool.map(_one, enumerate(group)):
                            briefs[i] = b
                else:
                    for pair in enumerate(group):
                        i, b = _one(pair)
                        briefs[i] = b
                done = [b for b in briefs if b is not None]
                for node, b in zip(group, done):
                    outputs[node.node_id] = b
                accumulated.extend(done)
                pending = list(zip(group, done))
                has_images = any(self.registry.agent(n.agent_id).produces_images for n in group)
                if len(group) == 1 and not has_images:
                    running = done[0]
                    pending = []
            elif kinds == {K_IMAGE}:
                node = group[0]
                self._emit("node_started", node_id=node.node_id, kind=node.kind)
                t0 = time.time()
                img_pairs = [(n, b) for n, b in pending if self.registry.agent(n.agent_id).produces_images]
                other_pairs = [(n, b) for n, b in pending if not self.registry.agent(n.agent_id).produces_images]
                narrative = self.interpret_images([b for _, b in img_pairs] or [b for _, b in pending], node, goal, trace_id, usage)
                durations[node.node_id] = time.time() - t0
                outputs[node.node_id] = narrative
                if variant == VARIANT_NO_CONSOLIDATION:
                    accumulated.append(narrative)
                pending = other_pairs + [(node, narrative)]
                if len(pending) == 1:
                    running = narrative
                    pending = []
                self._emit("node_finished", node_id=node.node_id, kind=node.kind)
            elif kinds == {K_CONSOLIDATOR}:
                node = group[0]
                self._emit("node_started", node_id=node.node_id, kind=node.kind)
                t0 = time.time()
                inputs = [b for _, b in pending] if pending else ([running] if running else [])
                b = self.consolidate(inputs, node, goal, trace_id, usage, variant)
                durations[node.node_id] = time.time() - t0
                outputs[node.node_id] = b
                running = b
                pending = []
                self._emit("node_finished", node_id=node.node_id, kind=node.kind)
            else:
                raise ValueError(f"unexpected mixed compiled layer: {[n.node_id for n in group]}")
        if variant == VARIANT_NO_CONSOLIDATION:
            return Brief(
                text=_concat_with_headers(accumulated),
                producer_node=f"t{track_index}",
                source_briefs=tuple(b.producer_node for b in accumulated),
            )
        if running is None:
            raise ValueError(f"track {track_index} produced no brief")
        return running

    def execute(
        self,
        leg: Leg,
        goal: str,
        variant: str = VARIANT_FULL,
        fault: FaultPlan | None = None,
        trace_id: str | None = None,
        usage: UsageLedger | None = None,
    ) -> RunResult:
        """Run a compiled graph to completion.

        Tool failures degrade gracefully; only model transport failures mark
        the run failed, and even then the partial node outputs are returned.
        """
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        tid = trace_id or self.ledger.open_trace(goal)
        usage = usage or UsageLedger()
        outputs: dict[str, Brief] = {}
        durations: dict[str, float] = {}
        wall_start = time.time()
        failed = False
        error: str | None = None
        final_text = ""
        try:
            track_briefs: list[Brief] = []
            for ti in range(leg.track_count):
                track_briefs.append(
                    self._run_track(leg, ti, goal, tid, usage, variant, fault, outputs, durations)
                )
            merge_nodes = leg.nodes_of_kind(K_MERGE)
            if merge_nodes:
                node = merge_nodes[0]
                self._emit("node_started", node_id=node.node_id, kind=node.kind)
                t0 = time.time()
                merged = self.cross_track_merge(track_briefs, node, goal, tid, usage, variant)
                durations[node.node_id] = time.time() - t0
                outputs[node.node_id] = merged
                self._emit("node_finished", node_id=node.node_id, kind=node.kind)
            else:
                merged = track_briefs[0]
            reporter_node = leg.nodes_of_kind(K_REPORTER)[0]
            if variant == VARIANT_NO_REPORTER:
                final_text = merged.text
                outputs[reporter_node.node_id] = Brief(
                    text=final_text, producer_node=reporter_node.node_id, source_briefs=(merged.producer_node,)
                )
            else:
                self._emit("node_started", node_id=reporter_node.node_id, kind=reporter_node.kind)
                t0 = time.time()
                final_text = self.report(merged, goal, reporter_node, tid, usage)
                durations[reporter_node.node_id] = time.time() - t0
                outputs[reporter_node.node_id] = Brief(
                    text=final_text,
                    producer_node=reporter_node.node_id,
                    source_briefs=(merged.producer_node,),
                )
                self._emit("node_finished", node_id=reporter_node.node_id, kind=reporter_node.kind)
        except gateway.GatewayError as e:
            failed = True
            error = str(e)
            self._emit("failed", error=error)
        return RunResult(
            final_text=final_text,
            per_node_outputs=outputs,
            trace_id=tid,
            variant=variant,
            node_durations=durations,
            wall_clock_s=time.time() - wall_start,
            usage_by_stage=usage.by_stage(),
            failed=failed,
            error=error,
        )
