from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from legflow.registry import (
    RegistryError,
    catalog_for_architect,
    check_allowlist,
    load_registry,
)


def minimal_manifest() -> dict:
    agents = [
        {
            "id": "spec1",
            "kind": "specialist",
            "data_class": "observation",
            "system_prompt": "prompt one",
            "router_capabilities": "caps",
            "tool_names": ["t1"],
            "tool_schemas": [{"name": "t1", "description": "d", "parameters": {"type": "object"}}],
        }
    ]
    for role in ("architect", "consolidator", "cross_track_merge", "image", "reporter"):
        agents.append(
            {
                "id": f"g_{role}",
                "kind": "general_purpose",
                "data_class": "none",
                "system_prompt": f"{role} prompt",
                "router_capabilities": "",
                "tool_names": [],
                "tool_schemas": [],
            }
        )
    return {
        "agents": agents,
        "roles": {role: f"g_{role}" for role in ("architect", "consolidator", "cross_track_merge", "image", "reporter")},
    }


def test_default_registry_has_six_specialists_and_five_general(registry):
    assert len(registry.agents) == 11
    assert len(registry.specialists()) == 6
    assert set(registry.general_roles) == {"architect", "consolidator", "cross_track_merge", "image", "reporter"}


def test_empty_manifest_reports_missing_roles():
    with pytest.raises(RegistryError) as e:
        load_registry({"agents": [], "roles": {}})
    assert "missing general role: architect" in str(e.value)


def test_tool_without_schema_names_agent_and_tool():
    manifest = minimal_manifest()
    manifest["agents"][0]["tool_names"] = ["t1", "x"]
    with pytest.raises(RegistryError) as e:
        load_registry(manifest)
    assert "spec1" in str(e.value) and "'x'" in str(e.value)


def test_orphan_schema_rejected():
    manifest = minimal_manifest()
    manifest["agents"][0]["tool_schemas"].append({"name": "extra", "description": "", "parameters": {}})
    with pytest.raises(RegistryError) as e:
        load_registry(manifest)
    assert "extra" in str(e.value)


def test_duplicate_id_rejected():
    manifest = minimal_manifest()
    manifest["agents"].append(dict(manifest["agents"][0]))
    with pytest.raises(RegistryError) as e:
        load_registry(manifest)
    assert "duplicate id: spec1" in str(e.value)


def test_specialist_without_data_class_rejected():
    manifest = minimal_manifest()
    manifest["agents"][0]["data_class"] = "none"
    with pytest.raises(RegistryError) as e:
        load_registry(manifest)
    assert "specialist without data_class" in str(e.value)


def test_general_purpose_with_tools_rejected():
    manifest = minimal_manifest()
    manifest["agents"][1]["tool_names"] = ["t9"]
    manifest["agents"][1]["tool_schemas"] = [{"name": "t9", "parameters": {}}]
    with pytest.raises(RegistryError):
        load_registry(manifest)


def test_roles_must_be_distinct():
    manifest = minimal_manifest()
    manifest["roles"]["reporter"] = "g_image"
    with pytest.raises(RegistryError) as e:
        load_registry(manifest)
    assert "distinct" in str(e.value)


def test_unknown_extra_fields_preserved():
    manifest = minimal_manifest()
    manifest["agents"][0]["color"] = "teal"
    reg = load_registry(manifest)
    assert reg.agent("spec1").extra["color"] == "teal"
    assert reg.to_manifest()["agents"][0]["color"] == "teal"


def test_manifest_round_trip(registry):
    again = load_registry(registry.to_manifest())
    assert again == registry


def test_catalog_projects_only_routing_fields(registry):
    catalog = catalog_for_architect(registry)
    assert len(catalog) == 6
    doc = json.dumps([c.to_dict() for c in catalog])
    for agent in registry.specialists():
        # no long fragment of any system prompt may leak into the catalog
        assert agent.system_prompt[:30] not in doc
    stofs = next(c for c in catalog if c.id == "stofs")
    assert stofs.produces_images is True


def test_catalog_empty_for_no_specialists():
    manifest = minimal_manifest()
    manifest["agents"] = manifest["agents"][1:]
    reg = load_registry(manifest)
    assert catalog_for_architect(reg) == []


def test_allowlist_decisions(registry):
    assert check_allowlist(registry, "noaa_coops", "noaa_search_stations").permitted
    assert check_allowlist(registry, "noaa_coops", "nhc_get_best_track").denied
    assert check_allowlist(registry, "reporter", "noaa_search_stations").denied
    with pytest.raises(KeyError):
        check_allowlist(registry, "nope", "t")


def test_allowlist_exhaustive_on_default_registry(registry):
    all_tools = {t for a in registry.agents.values() for t in a.tool_names}
    for agent in registry.agents.values():
        for tool in all_tools:
            decision = check_allowlist(registry, agent.id, tool)
            assert decision.permitted == (tool in agent.tool_names)


@given(prompt=st.text(min_size=21, max_size=200))
def test_catalog_never_leaks_prompt_fragments(prompt):
    manifest = minimal_manifest()
    manifest["agents"][0]["system_prompt"] = prompt
    reg = load_registry(manifest)
    doc = json.dumps([c.to_dict() for c in catalog_for_architect(reg)], ensure_ascii=False)
    for start in range(0, len(prompt) - 20):
        assert prompt[start : start + 21] not in doc
