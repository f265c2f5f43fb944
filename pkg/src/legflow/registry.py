"""Agent registry: identities, routing capabilities, and enforced tool allowlists.

The registry is loaded once from a JSON manifest and is immutable afterwards,
so it can be shared freely across concurrent executors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
SPECIALIST = "specialist"
GENERAL_PURPOSE = "general_purpose"

DATA_CLASSES = ("observation", "hypothetical", "forecast", "none")

# The five general-purpose roles every registry must bind.
GENERAL_ROLES = ("architect", "consolidator", "cross_track_merge", "image", "reporter")


class RegistryError(ValueError):
    """Manifest failed validation; ``problems`` lists every offending entry."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass(frozen=True)
class AgentSpec:
    """One registry entry: identity, routing surface, and tool allowlist."""

    id: str
    kind: str  # specialist | general_purpose
    data_class: str  # observation | hypothetical | forecast | none
    system_prompt: str
    router_capabilities: str
    tool_names: frozenset[str] = frozenset()
    tool_schemas: tuple[dict, ...] = ()
    produces_images: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    def to_manifest(self) -> dict:
        doc = {
            "id": self.id,
            "kind": self.kind,
            "data_class": self.data_class,
            "system_prompt": self.system_prompt,
            "router_capabilities": self.router_capabilities,
            "tool_names": sorted(self.tool_names),
            "tool_schemas": list(self.tool_schemas),
            "produces_images": self.produces_images,
        }
        doc.update(self.extra)
        return doc


@dataclass(frozen=True)
class PermitDecision:
    """Outcome of an allowlist check, carried into the provenance ledger."""

    agent_id: str
    tool_name: str
    permitted: bool

    @property
    def denied(self) -> bool:
        return not self.permitted


@dataclass(frozen=True)
class CatalogEntry:
    """Projection of a specialist shown to the planner.

    Deliberately excludes system prompts and tool schemas: the planner only
    needs identity, data class, and the condensed capability text.
    """

    id: str
    data_class: str
    router_capabilities: str
    produces_images: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "data_class": self.data_class,
            "router_capabilities": self.router_capabilities,
            "produces_images": self.produces_images,
        }


@dataclass(frozen=True)
class Registry:
    agents: dict[str, AgentSpec]
    general_roles: dict[str, str]  # role name -> agent id

    def agent(self, agent_id: str) -> AgentSpec:
        try:
            return self.agents[agent_id]
        except KeyError:
            raise KeyError(f"unknown agent id: {agent_id!r}") from None

    def role_agent(self, role: str) -> AgentSpec:
        return self.agent(self.general_roles[role])

    def specialists(self) -> list[AgentSpec]:
        return [a for a in self.agents.values() if a.kind == SPECIALIST]

    def specialist_ids(self) -> set[str]:
        return {a.id for a in self.specialists()}

    @property
    def architect_id(self) -> str:
        return self.general_roles["architect"]

    def to_manifest(self) -> dict:
        return {
            "agents": [a.to_manifest() for a in self.agents.values()],
            "roles": dict(self.general_roles),
        }


_KNOWN_FIELDS = {
    "id",
    "kind",
    "data_class",
    "system_prompt",
    "router_capabilities",
    "tool_names",
    "tool_schemas",
    "produces_images",
}


def _parse_agent(doc: dict, problems: list[str]) -> AgentSpec | None:
    agent_id = doc.get("id")
    if not agent_id or not isinstance(agent_id, str):
        problems.append("agent entry without an id")
        return None
    kind = doc.get("kind", "")
    if kind not in (SPECIALIST, GENERAL_PURPOSE):
        problems.append(f"{agent_id}: unknown kind {kind!r}")
        return None
    data_class = doc.get("data_class", "none")
    if data_class not in DATA_CLASSES:
        problems.append(f"{agent_id}: unknown data_class {data_class!r}")
        return None
    if kind == SPECIALIST and data_class == "none":
        problems.append(f"{agent_id}: specialist without data_class")
    if kind == GENERAL_PURPOSE and data_class != "none":
        problems.append(f"{agent_id}: general_purpose agent must have data_class none")

    tool_names = frozenset(doc.get("tool_names", []))
    tool_schemas = tuple(doc.get("tool_schemas", []))
    if kind == GENERAL_PURPOSE and tool_names:
        problems.append(f"{agent_id}: general_purpose agent with non-empty tool_names")
    schema_names: list[str] = []
    for schema in tool_schemas:
        name = (schema.get("function") or {}).get("name") if "function" in schema else schema.get("name")
        schema_names.append(name or "?")
    if len(set(schema_names)) != len(schema_names):
        problems.append(f"{agent_id}: duplicate tool schema names")
    missing_schema = tool_names - set(schema_names)
    for tool in sorted(missing_schema):
        problems.append(f"{agent_id}: tool {tool!r} listed in tool_names but has no schema")
    orphan_schema = set(schema_names) - tool_names
    for tool in sorted(orphan_schema):
        problems.append(f"{agent_id}: tool schema {tool!r} not listed in tool_names")

    extra = {k: v for k, v in doc.items() if k not in _KNOWN_FIELDS}
    return AgentSpec(
        id=agent_id,
        kind=kind,
        data_class=data_class,
        system_prompt=doc.get("system_prompt", ""),
        router_capabilities=doc.get("router_capabilities", ""),
        tool_names=tool_names,
        tool_schemas=tool_schemas,
        produces_images=bool(doc.get("produces_images", False)),
        extra=extra,
    )


def load_registry(source: dict | str | Path) -> Registry:
    """Parse and validate a registry manifest.

    ``source`` may be a parsed manifest dict, a JSON string, or a path to a
    JSON file. Raises :class:`RegistryError` listing every violation found,
    each naming the offending agent or role.
    """
    if isinstance(source, Path):
        doc = json.loads(source.read_text())
    elif isinstance(source, str):
        p = Path(source)
        doc = json.loads(p.read_text()) if p.exists() else json.loads(source)
    else:
        doc = source
    if not isinstance(doc, dict):
        raise RegistryError(["manifest is not a JSON object"])

    problems: list[str] = []
    agents: dict[str, AgentSpec] = {}
    for entry in doc.get("agents", []):
        spec = _parse_agent(entry, problems)
        if spec is None:
            continue
        if spec.id in agents:
            problems.append(f"duplicate id: {spec.id}")
            continue
        agents[spec.id] = spec

    roles_doc = doc.get("roles", {})
    roles: dict[str, str] = {}
    for role in GENERAL_ROLES:
        agent_id = roles_doc.get(role)
        if not agent_id:
            problems.append(f"missing general role: {role}")
            continue
        agent = agents.get(agent_id)
        if agent is None:
            problems.append(f"role {role} bound to unknown agent {agent_id!r}")
            continue
        if agent.kind != GENERAL_PURPOSE:
            problems.append(f"role {role} bound to non-general agent {agent_id!r}")
            continue
        roles[role] = agent_id
    bound = [aid for aid in roles.values()]
    if len(set(bound)) != len(bound):
        problems.append("general roles must bind distinct agents")

    if problems:
        raise RegistryError(problems)
    return Registry(agents=agents, general_roles=roles)


def catalog_for_architect(registry: Registry) -> list[CatalogEntry]:
    """Project the specialists into the planner-facing catalog.

    System prompts and tool schemas never cross this boundary; the planner
    works from the condensed routing text alone.
    """
    return [
        CatalogEntry(
            id=a.id,
            data_class=a.data_class,
            router_capabilities=a.router_capabilities,
            produces_images=a.produces_images,
        )
        for a in registry.specialists()
    ]


def check_allowlist(registry: Registry, agent_id: str, tool_name: str) -> PermitDecision:
    """Decide whether ``agent_id`` may call ``tool_name``.

    Raises ``KeyError`` for an unknown agent; a known agent always gets a
    decision object (permit or deny) so the ledger can record it.
    """
    agent = registry.agent(agent_id)
    return PermitDecision(agent_id=agent_id, tool_name=tool_name, permitted=tool_name in agent.tool_names)
