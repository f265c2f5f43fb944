from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from legflow import data_path
from legflow.evaluator import Harness
from legflow.gateway import ScriptedBackend, scripted_backend
from legflow.provenance import Ledger
from legflow.runtime import default_fixture_backend, default_heuristics_text, default_patterns, default_registry
from legflow.service import GatewayService, create_app

P01_QUERY = (
    "What was the storm surge at Galveston during Hurricane Ike in 2008, and what are the FEMA flood "
    "zones for Miami Beach?"
)


def make_service(extra_scripts: dict[str, dict] | None = None, **kwargs) -> GatewayService:
    scripts = dict(extra_scripts or {})

    def factory(entry, variant):
        if entry.query in scripts:
            return scripted_backend(scripts[entry.query])
        return ScriptedBackend(data_path("scenarios", "P01.json"))

    harness = Harness(
        registry=default_registry(),
        heuristics_text=default_heuristics_text(),
        model_factory=factory,
        tool_backend=default_fixture_backend(),
        patterns=default_patterns(),
    )
    return GatewayService(harness, ledger=Ledger(), synchronous=True, **kwargs)


@pytest.fixture()
def client() -> TestClient:
    return TestClient(create_app(make_service()))


def submit(client, query=P01_QUERY, **body):
    r = client.post("/sessions", json={"query": query, **body})
    assert r.status_code == 201, r.text
    return r.json()


def test_submit_returns_plan_awaiting_approval(client):
    doc = submit(client)
    assert doc["state"] == "awaiting_approval"
    assert doc["plan"]["topology"] == "parallel_tracks"
    assert len(doc["plan"]["tracks"]) == 2


def test_get_plan_includes_compiled_leg(client):
    doc = submit(client)
    r = client.get(f"/sessions/{doc['session_id']}/plan")
    assert r.status_code == 200
    leg = r.json()["leg"]
    node_ids = [n["node_id"] for n in leg["nodes"]]
    assert "t0.l0.nhc" in node_ids
    assert any(n.startswith("t1.l0.fema") for n in node_ids)
    assert "H3" in r.json()["rewrite_log"]


def test_happy_path_ends_with_reported(client):
    doc = submit(client)
    sid = doc["session_id"]
    r = client.post(f"/sessions/{sid}/approve")
    assert r.status_code == 200
    assert r.json()["state"] == "done"
    events = client.get(f"/sessions/{sid}/events").json()
    kinds = [e["kind"] for e in events]
    assert kinds[0] == "plan_proposed"
    assert "approved" in kinds
    assert kinds[-1] == "reported"
    seqs = [e["seq"] for e in events]
    assert seqs == list(range(1, len(seqs) + 1))  # gapless, strictly ordered
    # no execution before approval
    assert kinds.index("approved") < kinds.index("node_started")


def test_approve_twice_rejected(client):
    sid = submit(client)["session_id"]
    assert client.post(f"/sessions/{sid}/approve").status_code == 200
    assert client.post(f"/sessions/{sid}/approve").status_code == 409


def test_revise_in_wrong_state_rejected(client):
    sid = submit(client)["session_id"]
    client.post(f"/sessions/{sid}/approve")
    r = client.post(f"/sessions/{sid}/revise", json={"feedback": "drop the flood-map track"})
    assert r.status_code == 409


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/approve").status_code == 404


def test_revise_produces_new_plan():
    three_track = {
        "topology": "parallel_tracks",
        "tracks": [
            {"goal": "surge at Galveston during Hurricane Ike in 2008", "layers": [["nhc"], ["noaa_coops"]]},
            {"goal": "FEMA flood zones for Miami Beach", "layers": [["fema"]]},
            {"goal": "named storms in the 2005 Atlantic season", "layers": [["nhc"]]},
        ],
    }
    two_track = {
        "topology": "parallel_tracks",
        "tracks": [
            {"goal": "surge at Galveston during Hurricane Ike in 2008", "layers": [["nhc"], ["noaa_coops"]]},
            {"goal": "named storms in the 2005 Atlantic season", "layers": [["nhc"]]},
        ],
    }
    query = "three part question"
    script = {
        "exchanges": [
            {"match": {"stage": "architect", "ordinal": 0}, "respond": {"content": json.dumps(three_track)}},
            {"match": {"stage": "architect", "ordinal": 1}, "respond": {"content": json.dumps(two_track)}},
        ]
    }
    client = TestClient(create_app(make_service({query: script})))
    doc = submit(client, query=query)
    assert len(doc["plan"]["tracks"]) == 3
    r = client.post(f"/sessions/{doc['session_id']}/revise", json={"feedback": "drop the flood-map track"})
    assert r.status_code == 200
    assert len(r.json()["plan"]["tracks"]) == 2
    assert r.json()["revision_count"] == 1


def test_revision_cap_enforced():
    plan = {"topology": "linear", "tracks": [{"goal": "g", "layers": [["nhc"]]}]}
    query = "capped"
    script = {
        "exchanges": [
            {"match": {"stage": "architect"}, "respond": {"content": json.dumps(plan)}, "repeatable": True}
        ]
    }
    client = TestClient(create_app(make_service({query: script}, revision_cap=1)))
    sid = submit(client, query=query)["session_id"]
    assert client.post(f"/sessions/{sid}/revise", json={"feedback": "tweak"}).status_code == 200
    assert client.post(f"/sessions/{sid}/revise", json={"feedback": "again"}).status_code == 409


def test_event_stream_sse_frames_and_replay(client):
    sid = submit(client)["session_id"]
    client.post(f"/sessions/{sid}/approve")
    with client.stream("GET", f"/sessions/{sid}/events?stream=true") as r:
        assert r.headers["content-type"].startswith("text/event-stream")
        body = "".join(r.iter_text())
    frames = [f for f in body.strip().split("\n\n") if f]
    assert frames[0].startswith("event: plan_proposed\nid: 1\n")
    for frame in frames:
        lines = frame.split("\n")
        assert lines[0].startswith("event: ")
        assert lines[1].startswith("id: ")
        assert lines[2].startswith("data: ")
        json.loads(lines[2][len("data: "):])
    # resume from the middle replays only the tail, identically
    with client.stream("GET", f"/sessions/{sid}/events?stream=true", headers={"Last-Event-ID": "2"}) as r:
        tail = "".join(r.iter_text())
    assert tail.strip().split("\n\n")[0] == frames[2]


def test_events_replayable_and_identical(client):
    sid = submit(client)["session_id"]
    client.post(f"/sessions/{sid}/approve")
    first = client.get(f"/sessions/{sid}/events").json()
    second = client.get(f"/sessions/{sid}/events").json()
    assert first == second
    assert client.get(f"/sessions/{sid}/events", params={"after": 3}).json() == [e for e in first if e["seq"] > 3]


def test_trace_endpoints(client):
    sid = submit(client)["session_id"]
    client.post(f"/sessions/{sid}/approve")
    session = client.get(f"/sessions/{sid}").json()
    trace_id = session["trace_id"]
    listing = client.get("/traces").json()
    assert trace_id in listing["trace_ids"]
    records = client.get(f"/traces/{trace_id}", params={"kind": "tool_call"}).json()["records"]
    assert records and all(r["kind"] == "tool_call" for r in records)
    errors = client.get(f"/traces/{trace_id}", params={"outcome": "error"}).json()["records"]
    assert errors == []
    export = client.get(f"/traces/{trace_id}/export").json()
    assert export["header"]["trace_id"] == trace_id
    assert len(export["records"]) >= len(records)
    assert client.get("/traces/missing").status_code == 404


def test_auth_token_enforced():
    service = make_service(auth_token="sekrit")
    client = TestClient(create_app(service))
    assert client.post("/sessions", json={"query": P01_QUERY}).status_code == 401
    r = client.post("/sessions", json={"query": P01_QUERY}, headers={"x-auth-token": "sekrit"})
    assert r.status_code == 201


def test_catalog_endpoint(client):
    doc = client.get("/registry/catalog").json()
    assert {c["id"] for c in doc} == {"nhc", "noaa_coops", "usgs", "fema", "stofs", "osm"}
    assert all("system_prompt" not in c for c in doc)
