from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from legflow.executor import static_leg
from legflow.leg import (
    K_CONSOLIDATOR,
    K_IMAGE,
    K_MERGE,
    K_REPORTER,
    K_SPECIALIST,
    PlanParseError,
    PlanSpec,
    QueryFeatures,
    RewriteError,
    compile_leg,
    expected_node_count,
    extract_features,
    parse_plan,
    render_ascii,
    rewrite_with_heuristics,
    validate_plan,
)
from legflow.registry import load_registry


def plan_doc(topology, tracks):
    return {"topology": topology, "tracks": [{"goal": g, "layers": layers} for g, layers in tracks]}


def make_plan(topology, tracks):
    return parse_plan(plan_doc(topology, tracks))


IAN_QUERY = "What was the observed storm surge in Fort Myers during the Hurricane Ian event?"


# -- parse_plan ----------------------------------------------------------------


def test_parse_single_layer_linear():
    plan = make_plan("linear", [("g", [["noaa_coops"]])])
    assert plan.topology == "linear"
    assert len(plan.tracks) == 1
    assert plan.tracks[0].layers[0].agent_ids == ("noaa_coops",)


def test_parse_four_tracks():
    tracks = [(f"goal {i}", [["nhc"]]) for i in range(4)]
    plan = make_plan("parallel_tracks", tracks)
    assert plan.topology == "parallel_tracks"
    assert len(plan.tracks) == 4


def test_parse_garbage_fails():
    with pytest.raises(PlanParseError):
        parse_plan("hello")


def test_parse_unknown_topology():
    with pytest.raises(PlanParseError) as e:
        parse_plan(json.dumps({"topology": "ring", "tracks": [{"goal": "", "layers": [["nhc"]]}]}))
    assert "topology" in str(e.value)


def test_parse_empty_layer_names_position():
    with pytest.raises(PlanParseError) as e:
        parse_plan(json.dumps({"topology": "linear", "tracks": [{"goal": "", "layers": [[]]}]}))
    assert "track 0 layer 0" in str(e.value)


def test_parse_tolerates_fenced_output():
    text = "Here is the plan:\n```json\n" + json.dumps(plan_doc("linear", [("g", [["nhc"]])])) + "\n```"
    assert parse_plan(text).topology == "linear"


# -- validate_plan ---------------------------------------------------------------


def test_validate_architect_not_schedulable(registry):
    plan = make_plan("linear", [("g", [["graph_architect"]])])
    violations = validate_plan(plan, registry)
    assert any(v.code == "architect_not_schedulable" for v in violations)
    assert any("architect not schedulable" in v.message for v in violations)


def test_validate_topology_track_mismatch(registry):
    plan = PlanSpec(topology="linear", tracks=make_plan("parallel_tracks", [("a", [["nhc"]]), ("b", [["fema"]])]).tracks)
    violations = validate_plan(plan, registry)
    assert any(v.code == "topology_mismatch" for v in violations)


def test_validate_clean_three_track(registry):
    plan = make_plan(
        "parallel_tracks",
        [("a", [["nhc"], ["noaa_coops"]]), ("b", [["nhc"]]), ("c", [["fema"]])],
    )
    assert validate_plan(plan, registry) == []


def test_validate_unknown_agent_and_general(registry):
    plan = make_plan("linear", [("g", [["ghost", "reporter"]])])
    codes = {v.code for v in validate_plan(plan, registry)}
    assert "unknown_agent" in codes and "not_a_specialist" in codes


# -- extract_features -------------------------------------------------------------


def test_features_ian_surge(patterns):
    f = extract_features(IAN_QUERY, patterns)
    assert f.named_storm_detected and f.surge_requested and not f.location_scoped
    assert f.sub_question_count == 1


def test_features_empty(patterns):
    f = extract_features("", patterns)
    assert f == QueryFeatures()


def test_features_four_part_query(patterns):
    q = (
        "What is the observed storm surge from Hurricane Ian in Fort Myers, the total number of storms in "
        "HURDAT2 in 2011, the FEMA flood map guidance for Miami for a category 3 storm, and the average "
        "total water level in Seattle in May 2025?"
    )
    assert extract_features(q, patterns).sub_question_count == 4


def test_features_deterministic(patterns):
    a = extract_features(IAN_QUERY, patterns)
    b = extract_features(IAN_QUERY, patterns)
    assert a == b


def test_features_gauge_scoped(patterns):
    f = extract_features("Ike 2008 --- observed surge height at Galveston tide gauge?", patterns)
    assert f.surge_requested and f.location_scoped


# -- rewrite_with_heuristics -------------------------------------------------------


def test_rewrite_ian_inserts_context_and_survey(registry, patterns):
    plan = make_plan("linear", [(IAN_QUERY, [["noaa_coops"]])])
    features = extract_features(IAN_QUERY, patterns)
    out, log = rewrite_with_heuristics(plan, features, registry, patterns=patterns)
    layers = [list(l.agent_ids) for l in out.tracks[0].layers]
    assert layers == [["nhc"], ["noaa_coops", "usgs"]]
    assert "H1" in log and "H3" in log


def test_rewrite_fixed_point(registry, patterns):
    plan = make_plan("linear", [(IAN_QUERY, [["nhc"], ["noaa_coops", "usgs"]])])
    features = extract_features(IAN_QUERY, patterns)
    out, log = rewrite_with_heuristics(plan, features, registry, patterns=patterns)
    assert out == plan
    assert log == []


def test_rewrite_splits_mixed_classes_then_stages_basemap(registry, patterns):
    # observation + forecast sharing a layer: split first, then the basemap
    # specialist joins the image-producing forecast layer
    plan = make_plan("linear", [("surge and forecast map", [["noaa_coops", "stofs"]])])
    features = extract_features("What was the storm surge and the STOFS forecast contour?", patterns)
    out, log = rewrite_with_heuristics(plan, features, registry, patterns=patterns)
    layers = [list(l.agent_ids) for l in out.tracks[0].layers]
    assert layers == [["noaa_coops", "usgs"], ["stofs", "osm"]]
    assert log == ["H2", "H3", "H4"]


def test_rewrite_idempotent_on_mixed_plan(registry, patterns):
    plan = make_plan("linear", [("g", [["noaa_coops", "stofs"]])])
    features = extract_features("What was the storm surge and the STOFS forecast contour?", patterns)
    once, _ = rewrite_with_heuristics(plan, features, registry, patterns=patterns)
    twice, log2 = rewrite_with_heuristics(once, features, registry, patterns=patterns)
    assert once == twice
    assert log2 == []


def test_rewrite_multi_track_uses_track_goals(registry, patterns):
    plan = make_plan(
        "parallel_tracks",
        [
            ("Observed storm surge at Galveston during Hurricane Ike in 2008", [["nhc"], ["noaa_coops"]]),
            ("Average total water level in Seattle in May 2025", [["noaa_coops"]]),
        ],
    )
    features = extract_features("surge at Galveston during Ike, and Seattle water level", patterns)
    out, _ = rewrite_with_heuristics(plan, features, registry, patterns=patterns)
    assert [list(l.agent_ids) for l in out.tracks[0].layers] == [["nhc"], ["noaa_coops", "usgs"]]
    # the Seattle track must not inherit storm or survey context
    assert [list(l.agent_ids) for l in out.tracks[1].layers] == [["noaa_coops"]]


def test_rewrite_never_removes(registry, patterns):
    plan = make_plan("linear", [(IAN_QUERY, [["fema"], ["noaa_coops"]])])
    features = extract_features(IAN_QUERY, patterns)
    out, _ = rewrite_with_heuristics(plan, features, registry, patterns=patterns)
    assert plan.agent_ids() <= out.agent_ids()


def test_rewrite_missing_heuristic_agent_aborts(registry, patterns):
    manifest = registry.to_manifest()
    manifest["agents"] = [a for a in manifest["agents"] if a["id"] != "usgs"]
    reg = load_registry(manifest)
    plan = make_plan("linear", [(IAN_QUERY, [["nhc"], ["noaa_coops"]])])
    features = extract_features(IAN_QUERY, patterns)
    with pytest.raises(RewriteError) as e:
        rewrite_with_heuristics(plan, features, reg, patterns=patterns)
    assert e.value.heuristic == "H3"


# -- compile_leg --------------------------------------------------------------------


def test_compile_single_specialist(registry):
    leg = compile_leg(make_plan("linear", [("g", [["noaa_coops"]])]), registry)
    assert [(n.kind) for n in leg.nodes] == [K_SPECIALIST, K_REPORTER]


def test_compile_context_then_pair_shape(registry):
    leg = compile_leg(make_plan("linear", [("g", [["nhc"], ["noaa_coops", "usgs"]])]), registry)
    kinds = [n.kind for n in leg.nodes]
    assert kinds == [K_SPECIALIST, K_SPECIALIST, K_SPECIALIST, K_CONSOLIDATOR, K_REPORTER]
    assert [n.node_id for n in leg.nodes[:3]] == ["t0.l0.nhc", "t0.l1.noaa_coops", "t0.l1.usgs"]


def test_compile_image_layer(registry):
    leg = compile_leg(make_plan("linear", [("g", [["stofs", "osm"]])]), registry)
    kinds = [n.kind for n in leg.nodes]
    assert kinds == [K_SPECIALIST, K_SPECIALIST, K_IMAGE, K_REPORTER]


def test_compile_merge_iff_multi_track(registry):
    leg = compile_leg(make_plan("parallel_tracks", [("a", [["nhc"]]), ("b", [["fema"]])]), registry)
    assert len(leg.nodes_of_kind(K_MERGE)) == 1
    leg2 = compile_leg(make_plan("linear", [("a", [["nhc"]])]), registry)
    assert leg2.nodes_of_kind(K_MERGE) == []


def test_compile_rejects_invalid(registry):
    with pytest.raises(ValueError):
        compile_leg(make_plan("linear", [("g", [["ghost"]])]), registry)


def test_static_leg_shape_and_count(registry):
    leg = static_leg(registry)
    specialist_order = [n.agent_id for n in leg.nodes if n.kind == K_SPECIALIST]
    assert specialist_order == ["nhc", "noaa_coops", "usgs", "fema"]
    assert len(leg.nodes) == 7
    assert len(leg.nodes_of_kind(K_CONSOLIDATOR)) == 2  # layer fusion + track close
    assert leg.nodes[-1].kind == K_REPORTER


def test_static_leg_missing_specialist(registry):
    manifest = registry.to_manifest()
    manifest["agents"] = [a for a in manifest["agents"] if a["id"] != "fema"]
    reg = load_registry(manifest)
    with pytest.raises(ValueError):
        static_leg(reg)


def test_render_ascii_mentions_every_agent(registry):
    leg = static_leg(registry)
    art = render_ascii(leg)
    for agent in ("nhc", "noaa_coops", "usgs", "fema", "reporter"):
        assert agent in art


# -- property suite -------------------------------------------------------------------


def _plan_strategy(registry):
    ids = sorted(registry.specialist_ids())
    layer = st.lists(st.sampled_from(ids), min_size=1, max_size=3, unique=True)
    track = st.builds(
        lambda layers: ("goal", [list(l) for l in layers]),
        st.lists(layer, min_size=1, max_size=3),
    )
    def build(tracks):
        topology = "linear" if len(tracks) == 1 else "parallel_tracks"
        return make_plan(topology, tracks)
    return st.lists(track, min_size=1, max_size=3).map(build)


@st.composite
def _features_strategy(draw):
    return QueryFeatures(
        named_storm_detected=draw(st.booleans()),
        surge_requested=draw(st.booleans()),
        location_scoped=draw(st.booleans()),
        sub_question_count=draw(st.integers(min_value=1, max_value=5)),
    )


@settings(max_examples=200, deadline=None)
@given(features=_features_strategy(), data=st.data())
def test_rewrite_and_compile_properties(registry, patterns, features, data):
    plan = data.draw(_plan_strategy(registry))
    out, _ = rewrite_with_heuristics(plan, features, registry, patterns=patterns)

    # idempotent
    again, log2 = rewrite_with_heuristics(out, features, registry, patterns=patterns)
    assert again == out and log2 == []

    # never removes
    assert plan.agent_ids() <= out.agent_ids()

    # no mixed data classes
    for track in out.tracks:
        for layer in track.layers:
            classes = {registry.agent(a).data_class for a in layer.agent_ids}
            assert len(classes) == 1

    assert validate_plan(out, registry) == []
    leg = compile_leg(out, registry)

    # node count matches the closed form
    assert len(leg.nodes) == expected_node_count(out, registry)

    # consolidator follows every multi-specialist (non-all-image) layer
    for ti, track in enumerate(out.tracks):
        groups = leg.layers_of_track(ti)
        gi = 0
        for layer in track.layers:
            assert {n.agent_id for n in groups[gi]} == set(layer.agent_ids)
            produces = [a for a in layer.agent_ids if registry.agent(a).produces_images]
            gi += 1
            if produces:
                assert groups[gi][0].kind == K_IMAGE
                gi += 1
            if len(layer.agent_ids) >= 2 and len(produces) < len(layer.agent_ids):
                assert groups[gi][0].kind == K_CONSOLIDATOR
                gi += 1

    # topology / structure invariants
    assert len(leg.nodes_of_kind(K_REPORTER)) == 1
    assert leg.nodes[-1].kind == K_REPORTER
    assert bool(leg.nodes_of_kind(K_MERGE)) == (len(out.tracks) >= 2)
    assert all(n.agent_id != registry.architect_id for n in leg.nodes)
    ids = [n.node_id for n in leg.nodes]
    assert len(set(ids)) == len(ids)
    for ti in range(leg.track_count):
        groups = leg.layers_of_track(ti)
        indices = [g[0].layer_index for g in groups]
        assert indices == sorted(indices)
