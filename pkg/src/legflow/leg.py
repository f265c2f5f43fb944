"""Plan and layer-execution-graph model.

A plan is what the planner proposes: one or more tracks, each an ordered list
of specialist layers. Compilation turns a validated plan into the executable
graph the user signs off on, inserting consolidation, image, merge, and
reporter nodes. The deterministic heuristic rewrite runs between validation
and compilation and only ever inserts or splits, never removes.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from typing import Any

from .registry import Registry, SPECIALIST

LINEAR = "linear"
PARALLEL_TRACKS = "parallel_tracks"

# LegNode kinds
K_SPECIALIST = "specialist"
K_CONSOLIDATOR = "consolidator"
K_IMAGE = "image"
K_MERGE = "cross_track_merge"
K_REPORTER = "reporter"

_DATA_CLASS_ORDER = {"observation": 0, "hypothetical": 1, "forecast": 2}


class PlanParseError(ValueError):
    """Planner output could not be parsed into a plan document."""


class RewriteError(ValueError):
    """A routing heuristic needed a specialist the registry does not have."""

    def __init__(self, heuristic: str, message: str):
        self.heuristic = heuristic
        super().__init__(f"{heuristic}: {message}")


@dataclass(frozen=True)
class LayerSpec:
    agent_ids: tuple[str, ...]


@dataclass(frozen=True)
class TrackSpec:
    goal_text: str
    layers: tuple[LayerSpec, ...]


@dataclass(frozen=True)
class PlanSpec:
    topology: str  # linear | parallel_tracks
    tracks: tuple[TrackSpec, ...]
    rationale: str | None = None

    def agent_ids(self) -> set[str]:
        return {aid for t in self.tracks for layer in t.layers for aid in layer.agent_ids}

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {
            "topology": self.topology,
            "tracks": [
                {"goal": t.goal_text, "layers": [list(l.agent_ids) for l in t.layers]}
                for t in self.tracks
            ],
        }
        if self.rationale:
            doc["rationale"] = self.rationale
        return doc


@dataclass(frozen=True)
class PlanViolation:
    code: str
    message: str
    track: int | None = None
    layer: int | None = None
    agent: str | None = None

    def __str__(self) -> str:
        where = []
        if self.track is not None:
            where.append(f"track {self.track}")
        if self.layer is not None:
            where.append(f"layer {self.layer}")
        if self.agent is not None:
            where.append(f"agent {self.agent}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"{self.code}: {self.message}{loc}"


@dataclass(frozen=True)
class LegNode:
    node_id: str
    kind: str
    agent_id: str
    track_index: int | None
    layer_index: int

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "kind": self.kind,
            "agent_id": self.agent_id,
            "track_index": self.track_index,
            "layer_index": self.layer_index,
        }


@dataclass(frozen=True)
class Leg:
    """Compiled layer execution graph.

    Edges are implicit: within a track every node of compiled layer k feeds
    every node of layer k+1; terminal track nodes feed the cross-track merge
    (when present) which feeds the reporter.
    """

    nodes: tuple[LegNode, ...]
    plan: PlanSpec

    def track_nodes(self, track_index: int) -> list[LegNode]:
        return [n for n in self.nodes if n.track_index == track_index]

    def nodes_of_kind(self, kind: str) -> list[LegNode]:
        return [n for n in self.nodes if n.kind == kind]

    @property
    def track_count(self) -> int:
        return len(self.plan.tracks)

    def specialist_ids(self) -> set[str]:
        return {n.agent_id for n in self.nodes if n.kind == K_SPECIALIST}

    def to_dict(self) -> dict:
        return {"nodes": [n.to_dict() for n in self.nodes], "plan": self.plan.to_dict()}

    def layers_of_track(self, track_index: int) -> list[list[LegNode]]:
        """Track nodes grouped by compiled layer index, ascending."""
        by_layer: dict[int, list[LegNode]] = {}
        for n in self.track_nodes(track_index):
            by_layer.setdefault(n.layer_index, []).append(n)
        return [by_layer[k] for k in sorted(by_layer)]


@dataclass(frozen=True)
class QueryFeatures:
    named_storm_detected: bool = False
    surge_requested: bool = False
    location_scoped: bool = False
    data_classes_requested: frozenset[str] = frozenset()
    image_specialist_requested: bool = False
    sub_question_count: int = 1


DEFAULT_PATTERNS: dict[str, Any] = {
    "named_storm": [
        r"(?i)\b(?:hurricane|tropical storm)\s+[A-Z][a-z]+",
        r"\b(?:Ian|Ike|Katrina|Sandy|Irma|Michael|Harvey|Ivan|Isabel|Helene|Irene|Katia|Ophelia|Rina|Bob)\b",
    ],
    "surge": [r"(?i)\bsurge\b", r"(?i)storm tide", r"(?i)high[- ]?water marks?"],
    "location_scoped": [r"(?i)\btide gauge\b", r"(?i)\bgauge\b", r"(?i)\bsurge data\b"],
    "image_specialist": [r"(?i)\bSTOFS\b", r"(?i)\bOSM\b", r"(?i)\bcontour\b", r"(?i)\bbasemap\b"],
    "sub_question_split": [
        r"(?i),\s+and\s+(?:\(\d+\)\s*)?(?=(?:what|how|is|was|were|the)\b)",
        r"(?i),\s+(?=the\s+(?:total|average|fema)\b)",
        r"(?i)\band also\b",
    ],
    "data_classes": {
        "observation": [r"(?i)observed|water level|storm surge|high[- ]?water|named storms|hurricanes? occurred|category"],
        "hypothetical": [r"(?i)flood zone|flood map|FIRM|NFHL|what if|hypothetical"],
        "forecast": [r"(?i)\bforecast\b|\bSTOFS\b|predicted water"],
    },
}


def _any_match(patterns: list[str], text: str) -> bool:
    return any(re.search(p, text) for p in patterns)


def extract_features(query_text: str, patterns: dict | None = None) -> QueryFeatures:
    """Deterministically derive routing features from the raw query text.

    Everything here is pattern-table driven so deployments can tune the
    trigger vocabulary without touching code.
    """
    tables = patterns or DEFAULT_PATTERNS
    text = query_text or ""
    splits = 0
    for p in tables["sub_question_split"]:
        splits += len(re.findall(p, text))
    classes = frozenset(
        cls for cls, pats in tables["data_classes"].items() if _any_match(pats, text)
    )
    return QueryFeatures(
        named_storm_detected=_any_match(tables["named_storm"], text),
        surge_requested=_any_match(tables["surge"], text),
        location_scoped=_any_match(tables["location_scoped"], text),
        data_classes_requested=classes,
        image_specialist_requested=_any_match(tables["image_specialist"], text),
        sub_question_count=1 + splits,
    )


# ---------------------------------------------------------------------------
# Plan parsing and validation
# ---------------------------------------------------------------------------

_JSON_BLOCK = re.compile(r"\{.*\}", re.DOTALL)


def parse_plan(text: str | dict) -> PlanSpec:
    """Parse planner output (raw text or an already-decoded document).

    The planner is instructed to emit a single JSON object; we tolerate
    fenced code blocks and surrounding prose by extracting the outermost
    JSON object from the text.
    """
    if isinstance(text, dict):
        doc = text
    else:
        m = _JSON_BLOCK.search(text or "")
        if not m:
            raise PlanParseError("not a plan document: no JSON object found")
        try:
            doc = json.loads(m.group(0))
        except json.JSONDecodeError as e:
            raise PlanParseError(f"not a plan document: {e}") from None
    if not isinstance(doc, dict):
        raise PlanParseError("not a plan document: top level is not an object")

    topology = doc.get("topology")
    if topology not in (LINEAR, PARALLEL_TRACKS):
        raise PlanParseError(f"unknown topology token: {topology!r}")
    tracks_doc = doc.get("tracks")
    if not isinstance(tracks_doc, list) or not tracks_doc:
        raise PlanParseError("plan has no tracks")
    tracks: list[TrackSpec] = []
    for ti, tdoc in enumerate(tracks_doc):
        if not isinstance(tdoc, dict):
            raise PlanParseError(f"track {ti} is not an object")
        layers_doc = tdoc.get("layers")
        if not isinstance(layers_doc, list) or not layers_doc:
            raise PlanParseError(f"track {ti} has no layers")
        layers: list[LayerSpec] = []
        for li, layer in enumerate(layers_doc):
            if not isinstance(layer, list) or not layer:
                raise PlanParseError(f"track {ti} layer {li} is empty")
            if not all(isinstance(a, str) and a for a in layer):
                raise PlanParseError(f"track {ti} layer {li} has a non-string agent id")
            layers.append(LayerSpec(agent_ids=tuple(layer)))
        tracks.append(TrackSpec(goal_text=str(tdoc.get("goal", "")), layers=tuple(layers)))
    return PlanSpec(
        topology=topology,
        tracks=tuple(tracks),
        rationale=doc.get("rationale"),
    )


def validate_plan(plan: PlanSpec, registry: Registry) -> list[PlanViolation]:
    """Check a plan against its structural invariants and the registry.

    Violations are data, not exceptions: the planner loop feeds them back
    into the reprompt, and the sign-off UI lists them.
    """
    out: list[PlanViolation] = []
    if plan.topology == LINEAR and len(plan.tracks) != 1:
        out.append(PlanViolation("topology_mismatch", "linear topology requires exactly 1 track"))
    if plan.topology == PARALLEL_TRACKS and len(plan.tracks) < 2:
        out.append(PlanViolation("topology_mismatch", "parallel_tracks topology requires >= 2 tracks"))
    architect_id = registry.architect_id
    for ti, track in enumerate(plan.tracks):
        if not track.layers:
            out.append(PlanViolation("empty_track", "track has no layers", track=ti))
        for li, layer in enumerate(track.layers):
            if not layer.agent_ids:
                out.append(PlanViolation("empty_layer", "layer has no agents", track=ti, layer=li))
                continue
            if len(set(layer.agent_ids)) != len(layer.agent_ids):
                out.append(PlanViolation("duplicate_agent", "layer repeats an agent", track=ti, layer=li))
            for aid in layer.agent_ids:
                if aid == architect_id:
                    out.append(
                        PlanViolation("architect_not_schedulable", "architect not schedulable", track=ti, layer=li, agent=aid)
                    )
                    continue
                agent = registry.agents.get(aid)
                if agent is None:
                    out.append(PlanViolation("unknown_agent", "agent not in registry", track=ti, layer=li, agent=aid))
                elif agent.kind != SPECIALIST:
                    out.append(
                        PlanViolation("not_a_specialist", "only specialists may occupy layers", track=ti, layer=li, agent=aid)
                    )
    return out


# ---------------------------------------------------------------------------
# Deterministic heuristic rewrite
# ---------------------------------------------------------------------------

# Agents the heuristics reference. These ids are configuration: deployments
# with different registries can remap them.
DEFAULT_HEURISTIC_AGENTS = {
    "storm_context": "nhc",  # precedes other observation work when a named storm is in play
    "surge_gauge": "noaa_coops",
    "surge_survey": "usgs",  # complements gauge data on unscoped surge queries
    "basemap": "osm",  # staged alongside image-producing forecast specialists
}


def _data_class(registry: Registry, agent_id: str) -> str:
    return registry.agent(agent_id).data_class


def _split_mixed_layers(plan: PlanSpec, registry: Registry) -> PlanSpec:
    """H2: a layer never mixes data classes; split observation -> hypothetical -> forecast."""
    new_tracks = []
    for track in plan.tracks:
        new_layers: list[LayerSpec] = []
        for layer in track.layers:
            classes = {_data_class(registry, a) for a in layer.agent_ids}
            if len(classes) <= 1:
                new_layers.append(layer)
                continue
            buckets: dict[str, list[str]] = {}
            for aid in layer.agent_ids:
                buckets.setdefault(_data_class(registry, aid), []).append(aid)
            for cls in sorted(buckets, key=lambda c: _DATA_CLASS_ORDER.get(c, 99)):
                new_layers.append(LayerSpec(agent_ids=tuple(buckets[cls])))
        new_tracks.append(replace(track, layers=tuple(new_layers)))
    return replace(plan, tracks=tuple(new_tracks))


def rewrite_with_heuristics(
    plan: PlanSpec,
    features: QueryFeatures,
    registry: Registry,
    heuristic_agents: dict[str, str] | None = None,
    patterns: dict | None = None,
) -> tuple[PlanSpec, list[str]]:
    """Apply the deterministic routing heuristics, in fixed order H1..H4.

    H1  named storm: the storm-context specialist gets its own layer ahead of
        any other observation work in the track.
    H2  layers never mix data classes (split, observation first).
    H3  unscoped surge queries pair the survey specialist with the gauge
        specialist in the same layer.
    H4  image-producing forecast specialists get the basemap specialist
        staged in their layer.

    In a multi-track plan, H1 and H3 judge each track by its own goal text
    (when present) so an unrelated track never inherits storm or surge
    context from a sibling sub-question.

    Returns the rewritten plan plus the names of the heuristics that fired.
    The rewrite is idempotent and never removes an agent the planner chose.
    """
    ids = dict(DEFAULT_HEURISTIC_AGENTS)
    if heuristic_agents:
        ids.update(heuristic_agents)
    applied: list[str] = []

    def _require(agent_id: str, heuristic: str) -> None:
        if agent_id not in registry.agents:
            raise RewriteError(heuristic, f"specialist {agent_id!r} not in registry")

    def _track_features(track: TrackSpec) -> QueryFeatures:
        if len(plan.tracks) >= 2 and track.goal_text.strip():
            return extract_features(track.goal_text, patterns)
        return features

    # H1: storm-context precedence
    storm = ids["storm_context"]
    new_tracks = []
    for track in plan.tracks:
        if not _track_features(track).named_storm_detected:
            new_tracks.append(track)
            continue
        layers = list(track.layers)
        # hoist out of shared layers first
        hoisted: list[LayerSpec] = []
        for layer in layers:
            if storm in layer.agent_ids and len(layer.agent_ids) > 1:
                rest = tuple(a for a in layer.agent_ids if a != storm)
                hoisted.append(LayerSpec((storm,)))
                hoisted.append(LayerSpec(rest))
            else:
                hoisted.append(layer)
        layers = hoisted
        first_obs = next(
            (
                i
                for i, layer in enumerate(layers)
                if any(
                    a in registry.agents and _data_class(registry, a) == "observation"
                    for a in layer.agent_ids
                )
            ),
            None,
        )
        if first_obs is not None:
            seen_before = any(storm in l.agent_ids for l in layers[: first_obs + 1])
            if not seen_before:
                _require(storm, "H1")
                layers.insert(first_obs, LayerSpec((storm,)))
        if layers != list(track.layers):
            applied.append("H1")
        new_tracks.append(replace(track, layers=tuple(layers)))
    plan = replace(plan, tracks=tuple(new_tracks))

    # H2: never mix data classes within a layer
    split = _split_mixed_layers(plan, registry)
    if split != plan:
        applied.append("H2")
        plan = split

    # H3: complementary survey data on unscoped surge queries
    gauge, survey = ids["surge_gauge"], ids["surge_survey"]
    new_tracks = []
    for track in plan.tracks:
        tf = _track_features(track)
        if not (tf.surge_requested and not tf.location_scoped):
            new_tracks.append(track)
            continue
        layers = []
        for layer in track.layers:
            if gauge in layer.agent_ids and survey not in layer.agent_ids:
                _require(survey, "H3")
                layers.append(LayerSpec(layer.agent_ids + (survey,)))
                applied.append("H3")
            else:
                layers.append(layer)
        new_tracks.append(replace(track, layers=tuple(layers)))
    plan = replace(plan, tracks=tuple(new_tracks))

    # H4: stage the basemap specialist with image-producing forecast agents
    basemap = ids["basemap"]
    new_tracks = []
    for track in plan.tracks:
        layers = []
        for layer in track.layers:
            needs_basemap = any(
                a in registry.agents
                and registry.agent(a).produces_images
                and _data_class(registry, a) == "forecast"
                and a != basemap
                for a in layer.agent_ids
            )
            if needs_basemap and basemap not in layer.agent_ids:
                _require(basemap, "H4")
                layers.append(LayerSpec(layer.agent_ids + (basemap,)))
                applied.append("H4")
            else:
                layers.append(layer)
        new_tracks.append(replace(track, layers=tuple(layers)))
    plan = replace(plan, tracks=tuple(new_tracks))

    # dedupe heuristic names, preserving order
    seen: set[str] = set()
    applied = [h for h in applied if not (h in seen or seen.add(h))]
    return plan, applied


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------


def compile_leg(plan: PlanSpec, registry: Registry) -> Leg:
    """Compile a validated plan into the executable graph.

    Per track: each plan layer becomes a compiled layer of specialist nodes.
    A layer whose members all produce images is fused by an image node; a
    multi-specialist layer otherwise gets a consolidator; a mixed layer gets
    the image node first, then the consolidator. A multi-layer track whose
    final layer produced no fusion node is closed by a consolidator so the
    graph always shows an explicit fusion stage before the merge/reporter.
    The cross-track merge exists iff the plan has >= 2 tracks; the reporter
    is always the single terminal node.
    """
    violations = validate_plan(plan, registry)
    if violations:
        raise ValueError("cannot compile an invalid plan: " + "; ".join(str(v) for v in violations))

    consolidator_id = registry.general_roles["consolidator"]
    image_id = registry.general_roles["image"]
    merge_id = registry.general_roles["cross_track_merge"]
    reporter_id = registry.general_roles["reporter"]

    nodes: list[LegNode] = []
    max_layer = 0
    for ti, track in enumerate(plan.tracks):
        li = 0
        fused_last = False
        for layer in track.layers:
            fused_last = False
            for aid in layer.agent_ids:
                nodes.append(LegNode(f"t{ti}.l{li}.{aid}", K_SPECIALIST, aid, ti, li))
            produces = [aid for aid in layer.agent_ids if registry.agent(aid).produces_images]
            li += 1
            if produces:
                nodes.append(LegNode(f"t{ti}.l{li}.{image_id}", K_IMAGE, image_id, ti, li))
                li += 1
                fused_last = True
            if len(layer.agent_ids) >= 2 and len(produces) < len(layer.agent_ids):
                nodes.append(LegNode(f"t{ti}.l{li}.{consolidator_id}", K_CONSOLIDATOR, consolidator_id, ti, li))
                li += 1
                fused_last = True
        if len(track.layers) >= 2 and not fused_last:
            nodes.append(LegNode(f"t{ti}.l{li}.{consolidator_id}", K_CONSOLIDATOR, consolidator_id, ti, li))
            li += 1
        max_layer = max(max_layer, li)

    if len(plan.tracks) >= 2:
        nodes.append(LegNode(f"merge.{merge_id}", K_MERGE, merge_id, None, max_layer))
        max_layer += 1
    nodes.append(LegNode(f"report.{reporter_id}", K_REPORTER, reporter_id, None, max_layer))
    return Leg(nodes=tuple(nodes), plan=plan)


def expected_node_count(plan: PlanSpec, registry: Registry) -> int:
    """Closed-form node count for a compiled plan (used by property tests)."""
    n = 0
    for track in plan.tracks:
        fused_last = False
        for layer in track.layers:
            fused_last = False
            n += len(layer.agent_ids)
            produces = [a for a in layer.agent_ids if registry.agent(a).produces_images]
            if produces:
                n += 1
                fused_last = True
            if len(layer.agent_ids) >= 2 and len(produces) < len(layer.agent_ids):
                n += 1
                fused_last = True
        if len(track.layers) >= 2 and not fused_last:
            n += 1
    if len(plan.tracks) >= 2:
        n += 1
    return n + 1  # reporter


def render_ascii(leg: Leg) -> str:
    """Layer diagram for terminal sign-off: one column per track."""
    lines = []
    for ti in range(leg.track_count):
        goal = leg.plan.tracks[ti].goal_text
        lines.append(f"track {ti}: {goal}" if goal else f"track {ti}")
        for group in leg.layers_of_track(ti):
            labels = ", ".join(f"{n.agent_id}[{n.kind}]" if n.kind != K_SPECIALIST else n.agent_id for n in group)
            lines.append(f"  | {labels}")
    tail = [n for n in leg.nodes if n.track_index is None]
    for n in tail:
        lines.append(f"  => {n.agent_id}[{n.kind}]")
    return "\n".join(lines)
