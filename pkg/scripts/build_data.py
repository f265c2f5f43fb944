#!/usr/bin/env python3
"""Regenerate the bundled corpus, scenario scripts, tool fixtures, reference
tables, and demo images under src/legflow/data/.

Single source of truth for the scripted world: station inventory, storm
records, survey events, flood-map lookups, and the per-query answer values the
scenario scripts embed. Outputs are committed; rerun after editing the tables
below.

Usage: python scripts/build_data.py
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from legflow.leg import K_CONSOLIDATOR, K_IMAGE, K_SPECIALIST, compile_leg, extract_features, parse_plan, rewrite_with_heuristics  # noqa: E402
from legflow.registry import load_registry  # noqa: E402

DATA = ROOT / "src" / "legflow" / "data"

REGISTRY = load_registry(DATA / "registry.json")
PATTERNS = json.loads((DATA / "patterns.json").read_text())

# ---------------------------------------------------------------------------
# World facts
# ---------------------------------------------------------------------------

STATIONS = {
    "Galveston": {"id": "8771450", "name": "Galveston Pier 21, TX", "datum": "NAVD88"},
    "The Battery": {"id": "8518750", "name": "The Battery, NY", "datum": "NAVD88"},
    "Grand Isle": {"id": "8761724", "name": "Grand Isle, LA", "datum": "NAVD88"},
    "Key West": {"id": "8724580", "name": "Key West, FL", "datum": "NAVD88"},
    "Dauphin Island": {"id": "8735180", "name": "Dauphin Island, AL", "datum": "NAVD88"},
    "Virginia Key": {"id": "8723214", "name": "Virginia Key, Biscayne Bay, FL", "datum": "NAVD88"},
    "Sewells Point": {"id": "8638610", "name": "Sewells Point, VA", "datum": "NAVD88"},
    "Fort Myers": {"id": "8725520", "name": "Fort Myers, Caloosahatchee River, FL", "datum": "NAVD88"},
    "Naples": {"id": "8725110", "name": "Naples, Gulf of Mexico, FL", "datum": "NAVD88"},
    "Kings Point": {"id": "8516945", "name": "Kings Point, NY", "datum": "NAVD88"},
    "Pensacola": {"id": "8729840", "name": "Pensacola, FL", "datum": "NAVD88"},
    "Sabine Pass": {"id": "8770570", "name": "Sabine Pass North, TX", "datum": "NAVD88"},
    "San Francisco": {"id": "9414290", "name": "San Francisco, CA", "datum": "MLLW"},
    "Seattle": {"id": "9447130", "name": "Seattle, WA", "datum": "NAVD88"},
}

STORMS = {
    ("Ike", 2008): {"sid": "al092008", "landfall": "Galveston, TX on 2008-09-13", "cat": 2, "wind_kt": 95},
    ("Sandy", 2012): {"sid": "al182012", "landfall": "near Brigantine, NJ on 2012-10-29", "cat": 1, "wind_kt": 70},
    ("Katrina", 2005): {"sid": "al122005", "landfall": "Buras, LA on 2005-08-29", "cat": 3, "wind_kt": 110, "peak_cat": 5, "peak_wind_kt": 150},
    ("Irma", 2017): {"sid": "al112017", "landfall": "Cudjoe Key, FL on 2017-09-10", "cat": 4, "wind_kt": 115},
    ("Michael", 2018): {"sid": "al142018", "landfall": "Mexico Beach, FL on 2018-10-10", "cat": 5, "wind_kt": 140},
    ("Harvey", 2017): {"sid": "al092017", "landfall": "San Jose Island, TX on 2017-08-26", "cat": 4, "wind_kt": 115},
    ("Ian", 2022): {"sid": "al092022", "landfall": "Cayo Costa, FL on 2022-09-28", "cat": 4, "wind_kt": 130, "peak_cat": 5, "peak_wind_kt": 140},
    ("Isabel", 2003): {"sid": "al132003", "landfall": "Drum Inlet, NC on 2003-09-18", "cat": 2, "wind_kt": 90},
    ("Ivan", 2004): {"sid": "al092004", "landfall": "Gulf Shores, AL on 2004-09-16", "cat": 3, "wind_kt": 105},
    ("Helene", 2024): {"sid": "al092024", "landfall": "Big Bend, FL on 2024-09-26", "cat": 4, "wind_kt": 120},
}

SEASON_TOTALS = {
    2005: {"named": 28, "hurricanes": 15, "major": 7},
    2011: {"named": 20, "hurricanes": 7, "major": 4},
    2017: {"named": 17, "hurricanes": 10, "major": 6},
    2020: {"named": 30, "hurricanes": 14, "major": 7},
}

HWM_EVENTS = {
    "Ian": {"event_id": "312", "year": 2022, "summary": {"Fort Myers": "255 marks across Lee County, peak 4.20 m NAVD88, mean 2.81 m", "Naples": "88 marks in Collier County, peak 2.90 m NAVD88"}},
    "Ike": {"event_id": "67", "year": 2008, "summary": {"Galveston": "231 marks on Galveston Island and Bolivar Peninsula, 4.6-6.1 m NAVD88 range", "Sabine Pass": "marks to 3.90 m (12.79 ft) at Sabine Pass North"}},
    "Sandy": {"event_id": "145", "year": 2012, "summary": {"Kings Point": "marks near 3.80 m NAVD88 at the western Long Island Sound head", "The Battery": "marks 2.6-3.4 m NAVD88 across lower Manhattan and Staten Island", "Galveston": "no marks: event did not affect the Texas coast"}},
    "Ivan": {"event_id": "22", "year": 2004, "summary": {"Pensacola": "marks peak near 4.00 m within the 3-5 m band east of the eye"}},
    "Katrina": {"event_id": "18", "year": 2005, "summary": {"Dauphin Island": "marks near 2.0 m NAVD88 on the island's gulf shore", "Grand Isle": "marks near 2.8 m NAVD88"}},
    "Irma": {"event_id": "288", "year": 2017, "summary": {"Key West": "marks near 1.2 m NAVD88 in the lower Keys", "Virginia Key": "sparse marks near 0.9 m NAVD88 along Biscayne Bay"}},
    "Isabel": {"event_id": "9", "year": 2003, "summary": {"Sewells Point": "marks near 1.9 m NAVD88 across Hampton Roads"}},
}

FEMA_ZONES = {
    "Miami Beach": {"lat": 25.790, "lon": -80.135, "zones": ["AE", "VE"], "bfe": "2.74-4.57 m NGVD29"},
    "Tampa": {"lat": 27.950, "lon": -82.457, "zones": ["AE"], "bfe": "2.4-3.4 m NGVD29"},
    "Galveston": {"lat": 29.301, "lon": -94.797, "zones": ["VE", "AE"], "bfe": "3.0-5.2 m NGVD29"},
    "Charleston": {"lat": 32.776, "lon": -79.931, "zones": ["AE", "VE"], "bfe": "2.7-4.6 m NGVD29"},
    "Corpus Christi": {"lat": 27.800, "lon": -97.396, "zones": ["VE", "AE"], "bfe": "2.9-4.9 m NGVD29"},
    "Miami": {"lat": 25.7617, "lon": -80.1918, "zones": ["VE", "AE"], "bfe": "2.74-4.57 m NGVD29"},
    "Omaha": {"lat": 41.257, "lon": -95.934, "zones": ["AE"], "bfe": "riverine reaches of the Missouri and Papillion"},
}

# Observed peak surge (meters above predicted tide) per (station key, storm).
SURGES = {
    ("Galveston", "Ike"): {"value": 2.44, "peak_utc": "2008-09-13 07:00 UTC"},
    ("The Battery", "Sandy"): {"value": 2.81, "peak_utc": "2012-10-29 21:24 UTC"},
    ("Grand Isle", "Katrina"): {"value": 2.49, "peak_utc": "2005-08-29 11:00 UTC", "note": "gauge gap near landfall; peak reconstructed from partial record"},
    ("Key West", "Irma"): {"value": 0.98, "peak_utc": "2017-09-10 12:30 UTC"},
    ("Dauphin Island", "Katrina"): {"value": 1.64, "peak_utc": "2005-08-29 10:30 UTC"},
    ("Virginia Key", "Irma"): {"value": 0.61, "peak_utc": "2017-09-10 14:06 UTC"},
    ("Sewells Point", "Isabel"): {"value": 1.46, "peak_utc": "2003-09-18 20:00 UTC"},
    ("Sabine Pass", "Ike"): {"value": 3.90, "peak_utc": "2008-09-13 06:30 UTC"},
    ("Fort Myers", "Ian"): {"value": 2.21, "peak_utc": "2022-09-28 22:18 UTC"},
    ("Naples", "Ian"): {"value": 1.95, "peak_utc": "2022-09-28 20:30 UTC"},
    ("Kings Point", "Sandy"): {"value": 3.56, "peak_utc": "2012-10-29 23:30 UTC"},
    ("Pensacola", "Ivan"): {"value": 2.95, "peak_utc": "2004-09-16 07:00 UTC"},
    ("Galveston", "Sandy"): {"value": 0.18, "peak_utc": "2012-10-29 12:00 UTC", "note": "no storm signal; Sandy tracked up the East Coast"},
}

# ---------------------------------------------------------------------------
# Usage budgets for the seven-query representative subset.
# Row sums (in+out across stages) must match the per-query token reference;
# column sums must match the per-stage token reference. Attribution of image
# and merge usage folds into the consolidator stage.
# ---------------------------------------------------------------------------

SUBSET_USAGE = {
    # id: {stage: (input, output)}
    "S02": {"architect": (1800, 150), "specialist": (12946, 500), "consolidator": (0, 0), "reporter": (900, 250)},
    "O01": {"architect": (1700, 140), "specialist": (11470, 450), "consolidator": (0, 0), "reporter": (900, 250)},
    "L01": {"architect": (3000, 220), "specialist": (88689, 3300), "consolidator": (0, 0), "reporter": (1400, 350)},
    "L03": {"architect": (3200, 230), "specialist": (126450, 4700), "consolidator": (0, 0), "reporter": (1500, 380)},
    "M01": {"architect": (3300, 240), "specialist": (46807, 1800), "consolidator": (1500, 600), "reporter": (1400, 350)},
    "P01": {"architect": (4100, 290), "specialist": (91307, 3400), "consolidator": (1500, 600), "reporter": (1500, 400)},
    "C01": {"architect": (4433, 302), "specialist": (90974, 3365), "consolidator": (1697, 669), "reporter": (1627, 458)},
}

SUBSET_TOKEN_TOTALS = {"S02": 16546, "O01": 14910, "M01": 55997, "L01": 96959, "L03": 136460, "P01": 103097, "C01": 103525}
STAGE_TOKEN_TOTALS = {
    "architect": (21533, 1572),
    "specialist": (468643, 17515),
    "consolidator": (4697, 1869),
    "reporter": (9227, 2438),
}

DEFAULT_USAGE = {"architect": (2000, 180), "specialist": (20000, 900), "consolidator": (1200, 500), "reporter": (1000, 300)}


def _check_budgets() -> None:
    for stage, (ti, to) in STAGE_TOKEN_TOTALS.items():
        si = sum(SUBSET_USAGE[q][stage][0] for q in SUBSET_USAGE)
        so = sum(SUBSET_USAGE[q][stage][1] for q in SUBSET_USAGE)
        assert (si, so) == (ti, to), f"stage {stage}: {(si, so)} != {(ti, to)}"
    for q, total in SUBSET_TOKEN_TOTALS.items():
        got = sum(sum(SUBSET_USAGE[q][s]) for s in SUBSET_USAGE[q])
        assert got == total, f"query {q}: {got} != {total}"


# ---------------------------------------------------------------------------
# Brief composers
# ---------------------------------------------------------------------------


def sentinel(node_id: str) -> str:
    return f"<!--brief:{node_id}-->"


def nhc_track_brief(storm: str, year: int, node_id: str) -> tuple[list[dict], str]:
    info = STORMS[(storm, year)]
    calls = [
        {"name": "nhc_search_storms", "arguments": {"name": storm, "year": year}},
        {"name": "nhc_get_best_track", "arguments": {"storm_id": info["sid"]}},
    ]
    brief = (
        f"{sentinel(node_id)}\n"
        f"Hurricane {storm} ({info['sid']}) made landfall at {info['landfall']} as a "
        f"Category {info['cat']} hurricane (max wind {info['wind_kt']} kt). "
        f"Best-track fixes bracket the landfall window; track context passed downstage. "
        f"Source: NHC best track, https://www.nhc.noaa.gov/data/{info['sid']}.html"
    )
    return calls, brief


def nhc_category_brief(storm: str, year: int, node_id: str, peak: bool = False) -> tuple[list[dict], str]:
    info = STORMS[(storm, year)]
    calls = [
        {"name": "nhc_search_storms", "arguments": {"name": storm, "year": year}},
        {"name": "nhc_get_best_track", "arguments": {"storm_id": info["sid"]}},
    ]
    if peak:
        text = (
            f"{sentinel(node_id)}\n"
            f"Hurricane {storm} ({year}) reached peak intensity of Category {info['peak_cat']} "
            f"with maximum sustained winds of {info['peak_wind_kt']} kt. "
            f"Source: NHC Tropical Cyclone Report {info['sid'].upper()}."
        )
    else:
        text = (
            f"{sentinel(node_id)}\n"
            f"Hurricane {storm} made landfall at {info['landfall']} as a Category {info['cat']} "
            f"hurricane ({info['wind_kt']} kt). Source: NHC Tropical Cyclone Report {info['sid'].upper()}."
        )
    return calls, text


def nhc_totals_brief(year: int, node_id: str, which: str) -> tuple[list[dict], str]:
    totals = SEASON_TOTALS[year]
    calls = [{"name": "nhc_get_storm_totals", "arguments": {"year": year}}]
    if which == "named":
        core = f"the {year} Atlantic season produced {totals['named']} named storms"
    else:
        core = f"the {year} Atlantic season produced {totals['hurricanes']} hurricanes"
    text = (
        f"{sentinel(node_id)}\n"
        f"Per the HURDAT2 Atlantic database, {core} "
        f"({totals['hurricanes']} hurricanes, {totals['major']} major). "
        f"Source: HURDAT2 seasonal totals, year {year}."
    )
    return calls, text


def noaa_surge_brief(place: str, storm: str, node_id: str, window: str) -> tuple[list[dict], str]:
    st = STATIONS[place]
    obs = SURGES[(place, storm)]
    calls = [
        {"name": "noaa_search_stations", "arguments": {"name": place}},
        {"name": "noaa_compute_surge", "arguments": {"station_id": st["id"], "begin_date": window.split("/")[0], "end_date": window.split("/")[1]}},
    ]
    note = f" NOTE: {obs['note']}." if "note" in obs else ""
    text = (
        f"{sentinel(node_id)}\n"
        f"Peak storm surge of {obs['value']:.2f} m above predicted tide at NOAA CO-OPS station "
        f"{st['id']} ({st['name']}), {st['datum']} datum, peak at {obs['peak_utc']}.{note} "
        f"Source: NOAA CO-OPS verified water levels, https://tidesandcurrents.noaa.gov/stationhome.html?id={st['id']}"
    )
    return calls, text


def usgs_hwm_brief(storm: str, place: str, node_id: str) -> tuple[list[dict], str]:
    ev = HWM_EVENTS[storm]
    calls = [
        {"name": "usgs_stn_resolve_storm_event", "arguments": {"storm_name": storm, "year": ev["year"]}},
        {"name": "usgs_stn_get_hwms", "arguments": {"event_id": ev["event_id"], "location": place}},
    ]
    text = (
        f"{sentinel(node_id)}\n"
        f"USGS short-term network event {ev['event_id']} ({storm}): high-water marks near {place}: "
        f"{ev['summary'][place]}. Surveyed HWMs include wave run-up and overwash, not just stillwater surge. "
        f"Source: USGS flood event viewer, https://stn.wim.usgs.gov/fev/"
    )
    return calls, text


def fema_zone_brief(place: str, node_id: str) -> tuple[list[dict], str]:
    z = FEMA_ZONES[place]
    calls = [{"name": "fema_nfhl_identify", "arguments": {"latitude": z["lat"], "longitude": z["lon"]}}]
    zones = " and ".join(f"Zone {c}" for c in z["zones"])
    text = (
        f"{sentinel(node_id)}\n"
        f"Effective FEMA NFHL mapping at {place} shows {zones} special flood hazard areas; "
        f"base flood elevations {z['bfe']}. These are regulatory 1%-annual-chance values, not "
        f"storm-specific predictions. Source: FEMA NFHL MapServer, https://hazards.fema.gov/gis/nfhl/rest/services"
    )
    return calls, text


# ---------------------------------------------------------------------------
# Scenario assembly
# ---------------------------------------------------------------------------


def specialist_entries(node_id: str, calls: list[dict], brief: str, usage_rounds: list[tuple[int, int]]) -> list[dict]:
    """Two-round exchange: tool calls, then the final brief."""
    first, last = usage_rounds[0], usage_rounds[-1]
    entries = [
        {
            "match": {"stage": "specialist", "pattern": rf"(?s)rounds=0\n.*\[node {node_id.replace('.', chr(92) + '.')}\]"},
            "respond": {
                "content": "",
                "tool_calls": calls,
                "usage": {"input_tokens": first[0], "output_tokens": first[1]},
            },
        },
        {
            "match": {"stage": "specialist", "pattern": rf"(?s)rounds={len(calls)}\n.*\[node {node_id.replace('.', chr(92) + '.')}\]"},
            "respond": {"content": brief, "usage": {"input_tokens": last[0], "output_tokens": last[1]}},
        },
    ]
    return entries


def direct_specialist_entry(node_id: str, brief: str, usage: tuple[int, int]) -> list[dict]:
    """Specialist answers without calling any tool."""
    return [
        {
            "match": {"stage": "specialist", "pattern": rf"(?s)rounds=0\n.*\[node {node_id.replace('.', chr(92) + '.')}\]"},
            "respond": {"content": brief, "usage": {"input_tokens": usage[0], "output_tokens": usage[1]}},
        }
    ]


def consolidator_entry(node_id: str, content: str, usage: tuple[int, int]) -> dict:
    return {
        "match": {"stage": "consolidator", "pattern": rf"\[consolidate {node_id.replace('.', chr(92) + '.')}\]"},
        "respond": {"content": content, "usage": {"input_tokens": usage[0], "output_tokens": usage[1]}},
    }


def merge_entry(content: str, usage: tuple[int, int]) -> dict:
    return {
        "match": {"stage": "consolidator", "pattern": r"\[merge "},
        "respond": {"content": content, "usage": {"input_tokens": usage[0], "output_tokens": usage[1]}},
    }


def image_entry(node_id: str, content: str, usage: tuple[int, int]) -> dict:
    return {
        "match": {"stage": "consolidator", "pattern": rf"\[image {node_id.replace('.', chr(92) + '.')}\]"},
        "respond": {"content": content, "usage": {"input_tokens": usage[0], "output_tokens": usage[1]}},
    }


def reporter_entry(content: str, usage: tuple[int, int]) -> dict:
    return {
        "match": {"stage": "reporter", "pattern": r"\[report "},
        "respond": {"content": content, "usage": {"input_tokens": usage[0], "output_tokens": usage[1]}},
    }


def architect_entry(plan_doc: dict, usage: tuple[int, int]) -> dict:
    return {
        "match": {"stage": "architect", "ordinal": 0},
        "respond": {"content": json.dumps(plan_doc), "usage": {"input_tokens": usage[0], "output_tokens": usage[1]}},
    }


FIXTURES: dict[tuple[str, str], dict] = {}


def add_fixture(tool: str, args: dict, body: str = "", image_file: str | None = None, outcome: str = "ok") -> None:
    from legflow.tools import canonical_arguments

    key = (tool, canonical_arguments(args))
    entry: dict = {"tool": tool, "args": args, "result": {"outcome": outcome}}
    if image_file:
        entry["result"]["image_file"] = image_file
    else:
        entry["result"]["body"] = body
    if key in FIXTURES:
        assert FIXTURES[key] == entry, f"conflicting fixture for {key}"
        return
    FIXTURES[key] = entry


def fixture_body_for(tool: str, args: dict) -> str:
    """Plausible structured body for a tool call, derived from world facts."""
    if tool == "nhc_search_storms":
        key = (args["name"], args["year"])
        if key in STORMS:
            return json.dumps({"storm_id": STORMS[key]["sid"], "name": args["name"], "year": args["year"]})
        return json.dumps({"matches": [], "note": f"no storm named {args['name']} in {args['year']}"})
    if tool == "nhc_get_best_track":
        sid = args["storm_id"]
        rec = next(v for v in STORMS.values() if v["sid"] == sid)
        return json.dumps(
            {
                "storm_id": sid,
                "landfall": rec["landfall"],
                "landfall_category": rec["cat"],
                "max_wind_kt": rec.get("peak_wind_kt", rec["wind_kt"]),
                "url": f"https://www.nhc.noaa.gov/data/{sid}.html",
            }
        )
    if tool == "nhc_get_storm_totals":
        t = SEASON_TOTALS[args["year"]]
        return json.dumps({"year": args["year"], "named_storms": t["named"], "hurricanes": t["hurricanes"], "major_hurricanes": t["major"], "source": "HURDAT2"})
    if tool == "noaa_search_stations":
        name = args["name"]
        matches = [
            {"station_id": v["id"], "name": v["name"]}
            for k, v in STATIONS.items()
            if name.lower() in v["name"].lower() or name.lower() in k.lower()
        ]
        return json.dumps({"query": name, "matches": matches})
    if tool == "noaa_find_nearest_stations":
        return json.dumps({"station_id": args["station_id"], "nearby": []})
    if tool == "noaa_compute_surge":
        sid = args["station_id"]
        hit = next(
            (
                (place, storm, obs)
                for (place, storm), obs in SURGES.items()
                if STATIONS[place]["id"] == sid and obs["peak_utc"][:4] in args["begin_date"]
            ),
            None,
        )
        if hit is None:
            return json.dumps({"station_id": sid, "max_surge_m": None, "note": "no significant anomaly in window"})
        place, storm, obs = hit
        return json.dumps({"station_id": sid, "max_surge_m": obs["value"], "peak": obs["peak_utc"], "datum": STATIONS[place]["datum"]})
    if tool == "noaa_get_monthly_water_level_stats":
        return json.dumps({"station_id": args["station_id"], "months": 12, "url": "https://tidesandcurrents.noaa.gov/"})
    if tool == "noaa_coops_datagetter":
        return json.dumps({"station_id": args["station_id"], "product": args.get("product", ""), "url": "https://api.tidesandcurrents.noaa.gov/api/prod/datagetter"})
    if tool == "usgs_stn_resolve_storm_event":
        ev = HWM_EVENTS.get(args["storm_name"])
        if ev is None:
            return json.dumps({"matches": [], "note": f"no flood event for {args['storm_name']}"})
        return json.dumps({"event_id": ev["event_id"], "storm": args["storm_name"], "year": ev["year"]})
    if tool == "usgs_stn_get_hwms":
        eid = args["event_id"]
        storm = next(k for k, v in HWM_EVENTS.items() if v["event_id"] == eid)
        loc = args.get("location", "")
        summary = HWM_EVENTS[storm]["summary"].get(loc, "no marks near that location")
        return json.dumps({"event_id": eid, "location": loc, "summary": summary, "url": "https://stn.wim.usgs.gov/fev/"})
    if tool == "fema_nfhl_identify":
        hit = next(
            (v for v in FEMA_ZONES.values() if abs(v["lat"] - args["latitude"]) < 0.01 and abs(v["lon"] - args["longitude"]) < 0.01),
            None,
        )
        if hit is None:
            return json.dumps({"zones": [], "note": "point outside mapped NFHL panels"})
        return json.dumps({"zones": hit["zones"], "bfe": hit["bfe"], "source": "FEMA NFHL MapServer"})
    raise KeyError(f"no fixture rule for tool {tool}")


def register_call_fixtures(calls: list[dict]) -> None:
    for c in calls:
        if c["name"] == "stofs_get_max_water_level_contour":
            add_fixture(c["name"], c["arguments"], image_file="images/stofs_contour.png")
        elif c["name"] == "osm_get_basemap":
            add_fixture(c["name"], c["arguments"], image_file="images/osm_basemap.png")
        else:
            add_fixture(c["name"], c["arguments"], body=fixture_body_for(c["name"], c["arguments"]))


def split_usage(total: tuple[int, int], shares: int) -> list[tuple[int, int]]:
    """Split an (input, output) budget into n parts, remainder on the last."""
    if shares <= 0:
        return []
    i_each, o_each = total[0] // shares, total[1] // shares
    parts = [(i_each, o_each)] * (shares - 1)
    parts.append((total[0] - i_each * (shares - 1), total[1] - o_each * (shares - 1)))
    return parts


# ---------------------------------------------------------------------------
# Answer and brief composers per query kind
# ---------------------------------------------------------------------------


def surge_sentence(place: str, storm: str, value: float | None = None, include_utc: bool = True) -> str:
    st = STATIONS[place]
    obs = SURGES[(place, storm)]
    v = value if value is not None else obs["value"]
    when = f", peaking at {obs['peak_utc']}" if include_utc else ""
    return (
        f"Peak storm surge of {v:.2f} m above predicted tide at NOAA CO-OPS station {st['id']} "
        f"({st['name']}, {st['datum']} datum){when}"
    )


def hwm_sentence(storm: str, place: str) -> str:
    ev = HWM_EVENTS[storm]
    return f"USGS high-water marks (event {ev['event_id']}): {ev['summary'][place]}"


def zone_sentence(place: str) -> str:
    z = FEMA_ZONES[place]
    zones = " and ".join(f"Zone {c}" for c in z["zones"])
    return f"FEMA NFHL shows {zones} special flood hazard areas for {place}, base flood elevations {z['bfe']}"


def count_sentence(year: int, which: str) -> str:
    t = SEASON_TOTALS[year]
    n = t["named"] if which == "named" else t["hurricanes"]
    noun = "named storms" if which == "named" else "hurricanes"
    return f"The {year} Atlantic hurricane season produced {n} {noun} per the HURDAT2 database ({year} season totals)"


def category_sentence(storm: str, year: int, peak: bool = False) -> str:
    info = STORMS[(storm, year)]
    if peak:
        return (
            f"Hurricane {storm} reached peak intensity of Category {info['peak_cat']} "
            f"({info['peak_wind_kt']} kt); source: NHC Tropical Cyclone Report {info['sid'].upper()} ({year})"
        )
    return (
        f"Hurricane {storm} made landfall as a Category {info['cat']} hurricane ({info['wind_kt']} kt) "
        f"at {info['landfall']}; source: NHC Tropical Cyclone Report {info['sid'].upper()} ({year})"
    )


# Rubric builders --------------------------------------------------------------


def surge_rubric(place: str, prefix: str = "") -> list[dict]:
    station = STATIONS[place]["id"] if place in STATIONS else place
    return [
        {"name": f"{prefix}station_id", "pattern": station if place in STATIONS else place},
        {"name": f"{prefix}vertical_datum", "pattern": r"NAVD|MHHW|MLLW|NGVD|STND"},
        {"name": f"{prefix}temporal_reference", "pattern": r"UTC|\d{4}-\d{2}-\d{2}"},
        {"name": f"{prefix}source_name", "pattern": r"NOAA CO-OPS|CO-OPS"},
    ]


def count_rubric(year: int, prefix: str = "") -> list[dict]:
    return [
        {"name": f"{prefix}database_name", "pattern": "HURDAT2"},
        {"name": f"{prefix}year", "pattern": rf"\b{year}\b"},
    ]


def category_rubric(storm: str, year: int, prefix: str = "") -> list[dict]:
    sid = STORMS[(storm, year)]["sid"].upper()
    return [
        {"name": f"{prefix}source_name", "pattern": r"NHC|Tropical Cyclone Report"},
        {"name": f"{prefix}report_or_year", "pattern": rf"{sid}|\b{year}\b"},
    ]


def zone_rubric(prefix: str = "") -> list[dict]:
    return [
        {"name": f"{prefix}source_name", "pattern": r"FEMA|NFHL"},
        {"name": f"{prefix}zone_code", "pattern": r"\bAE\b|\bVE\b"},
    ]


# ---------------------------------------------------------------------------
# Task execution: map task tuples to composer output
# ---------------------------------------------------------------------------


def run_task(task: tuple, node_id: str) -> tuple[list[dict], str]:
    kind = task[0]
    if kind == "track":
        return nhc_track_brief(task[1], task[2], node_id)
    if kind == "category":
        return nhc_category_brief(task[1], task[2], node_id, peak=bool(task[3]) if len(task) > 3 else False)
    if kind == "totals":
        return nhc_totals_brief(task[1], node_id, task[2])
    if kind == "surge":
        return noaa_surge_brief(task[1], task[2], node_id, task[3])
    if kind == "hwm":
        return usgs_hwm_brief(task[1], task[2], node_id)
    if kind == "zone":
        return fema_zone_brief(task[1], node_id)
    if kind == "direct":
        return [], f"{sentinel(node_id)}\n{task[1]}"
    if kind == "sf_monthly":
        st = STATIONS["San Francisco"]
        calls = [
            {"name": "noaa_search_stations", "arguments": {"name": "San Francisco"}},
            {"name": "noaa_get_monthly_water_level_stats", "arguments": {"station_id": st["id"], "begin_date": "20250101", "end_date": "20251231"}},
            {"name": "noaa_coops_datagetter", "arguments": {"station_id": st["id"], "product": "flood_levels"}},
        ]
        months = ", ".join(f"2025-{m:02d}: {1.9 + 0.01 * m:.2f} m" for m in range(1, 13))
        brief = (
            f"{sentinel(node_id)}\n"
            f"Monthly maximum water levels for 2025 at NOAA CO-OPS station {st['id']} ({st['name']}, MLLW datum): "
            f"{months}. Minor flood threshold 2.62 m MLLW. Source: NOAA CO-OPS monthly extremes."
        )
        return calls, brief
    if kind == "monthly_mean":
        st = STATIONS[task[1]]
        calls = [
            {"name": "noaa_search_stations", "arguments": {"name": task[1]}},
            {"name": "noaa_get_monthly_water_level_stats", "arguments": {"station_id": st["id"], "begin_date": "20250501", "end_date": "20250531"}},
        ]
        brief = (
            f"{sentinel(node_id)}\n"
            f"Mean total water level at NOAA CO-OPS station {st['id']} ({st['name']}) for May 2025 was 1.312 m NAVD, "
            f"from 7440 six-minute observations (range -1.919 m to 3.076 m). Source: NOAA CO-OPS."
        )
        return calls, brief
    if kind == "current":
        st = STATIONS[task[1]]
        calls = [
            {"name": "noaa_search_stations", "arguments": {"name": task[1]}},
            {"name": "noaa_coops_datagetter", "arguments": {"station_id": st["id"], "product": "water_level"}},
        ]
        brief = (
            f"{sentinel(node_id)}\n"
            f"Current water level at NOAA CO-OPS station {st['id']} ({st['name']}) is 1.05 m MLLW as of "
            f"2026-08-10 17:00 UTC, within normal tidal range. Source: NOAA CO-OPS real-time data."
        )
        return calls, brief
    if kind == "stofs":
        calls = [{"name": "stofs_get_max_water_level_contour", "arguments": {"cycle": task[1], "bbox": task[2]}}]
        brief = (
            f"{sentinel(node_id)}\n"
            f"Rendered maximum total water level contour for forecast cycle {task[1]}, bbox {task[2]}. "
            f"Output image attached."
        )
        return calls, brief
    if kind == "osm":
        calls = [{"name": "osm_get_basemap", "arguments": {"bbox": task[1], "style": "standard"}}]
        brief = f"{sentinel(node_id)}\nRendered labeled basemap for bbox {task[1]} (standard style). Output image attached."
        return calls, brief
    if kind == "search_miss":
        calls = [{"name": "nhc_search_storms", "arguments": {"name": task[1], "year": task[2]}}]
        brief = (
            f"{sentinel(node_id)}\n"
            f"No storm named {task[1]} appears in the HURDAT2 Atlantic database for the {task[2]} season; "
            f"the most recent Atlantic {task[1]} was 1991. Source: HURDAT2."
        )
        return calls, brief
    if kind == "station_miss":
        calls = [{"name": "noaa_search_stations", "arguments": {"name": task[1]}}]
        brief = (
            f"{sentinel(node_id)}\n"
            f"No tide stations matched '{task[1]}' in the station inventory; there is nothing to observe "
            f"for this request. Source: NOAA CO-OPS station search."
        )
        return calls, brief
    raise KeyError(f"unknown task kind {kind}")


# ---------------------------------------------------------------------------
# Query specifications
# ---------------------------------------------------------------------------

WINDOWS = {
    "Ike": "20080912/20080915",
    "Sandy": "20121028/20121101",
    "Katrina": "20050828/20050831",
    "Irma": "20170909/20170912",
    "Ian": "20220927/20221004",
    "Isabel": "20030917/20030920",
    "Ivan": "20040915/20040918",
}


def T(goal: str, layers: list[list[str]], **tasks) -> dict:
    return {"goal": goal, "layers": layers, "tasks": tasks}


def fuse_surge_track(place: str, storm: str, include_utc: bool, reconcile: bool = False) -> str:
    parts = [
        "Fused findings: "
        + surge_sentence(place, storm, include_utc=include_utc)
        + ". "
        + hwm_sentence(storm, place)
        + "."
    ]
    if reconcile:
        parts.append(
            "Critical discrepancy reconciled: the gauge reads stillwater surge at an instrumented site while "
            "surveyed marks capture open-coast peaks with run-up; these datasets are complementary, not contradictory."
        )
    parts.append("Sources: NOAA CO-OPS and USGS.")
    return " ".join(parts)


def surge_answer(place: str, storm: str, year: int, value: float | None = None, extra: str = "") -> str:
    st = STATIONS[place]
    obs = SURGES[(place, storm)]
    v = value if value is not None else obs["value"]
    return (
        f"The peak storm surge at {place} during Hurricane {storm} ({year}) was {v:.2f} m above predicted tide "
        f"at NOAA CO-OPS station {st['id']} ({st['name']}, {st['datum']} datum).{extra} Source: NOAA CO-OPS."
    )


def zone_answer(place: str) -> str:
    z = FEMA_ZONES[place]
    zones = " and ".join(f"Zone {c}" for c in z["zones"])
    return (
        f"Effective FEMA NFHL mapping for {place} shows {zones} special flood hazard areas; "
        f"base flood elevations span {z['bfe']}. These are regulatory values from the FEMA NFHL MapServer, "
        f"not storm-specific predictions."
    )


def count_answer(year: int, which: str) -> str:
    return count_sentence(year, which) + "."


def category_answer(storm: str, year: int, peak: bool = False) -> str:
    return category_sentence(storm, year, peak) + "."


SPECS: dict[str, dict] = {}

# --- Single-agent NHC queries (category and count lookups) -------------------

_SINGLE_NHC = [
    ("S01", "How many named storms were in the 2005 Atlantic hurricane season?", ("totals", 2005, "named"), {"kind": "count", "value": 28}, count_answer(2005, "named"), count_rubric(2005)),
    ("S02", "What category was Hurricane Michael when it made landfall in Florida in 2018?", ("category", "Michael", 2018), {"kind": "category", "label": "Cat 5"}, category_answer("Michael", 2018), category_rubric("Michael", 2018)),
    ("S03", "What category was Hurricane Harvey at landfall in Texas in 2017?", ("category", "Harvey", 2017), {"kind": "category", "label": "Cat 4"}, category_answer("Harvey", 2017), category_rubric("Harvey", 2017)),
    ("S04", "What was the peak intensity of Hurricane Katrina in 2005?", ("category", "Katrina", 2005, True), {"kind": "category", "label": "Cat 5"}, category_answer("Katrina", 2005, peak=True), category_rubric("Katrina", 2005)),
    ("S05", "How many hurricanes occurred in the 2017 Atlantic season?", ("totals", 2017, "hurricanes"), {"kind": "count", "value": 10}, count_answer(2017, "hurricanes"), count_rubric(2017)),
    ("S06", "How many named storms were in the 2020 Atlantic hurricane season?", ("totals", 2020, "named"), {"kind": "count", "value": 30}, count_answer(2020, "named"), count_rubric(2020)),
    ("S07", "What category was Hurricane Ike when it made landfall in Texas in 2008?", ("category", "Ike", 2008), {"kind": "category", "label": "Cat 2"}, category_answer("Ike", 2008), category_rubric("Ike", 2008)),
]

for qid, query, task, truth, answer, rubric in _SINGLE_NHC:
    SPECS[qid] = {
        "category": "single_nhc",
        "query": query,
        "kind": truth["kind"],
        "truth": dict(truth, source="NHC"),
        "expected_agents": ["nhc"],
        "topology": "linear",
        "tracks": [T(query, [["nhc"]], nhc=task)],
        "consolidators": {},
        "merge": None,
        "answer": answer,
        "rubric": rubric,
        "sub_questions": 1,
    }

# --- Single-agent FEMA/NOAA queries ------------------------------------------

_SINGLE_O = [
    ("O01", "What are the FEMA flood zones for Miami Beach, Florida?", "Miami Beach"),
    ("O02", "What is the FEMA flood zone designation for Tampa, Florida?", "Tampa"),
    ("O04", "What is the FEMA flood zone for Galveston, Texas?", "Galveston"),
    ("O05", "What are the FEMA flood zones for Charleston, South Carolina?", "Charleston"),
]
for qid, query, place in _SINGLE_O:
    SPECS[qid] = {
        "category": "single_fema_noaa",
        "query": query,
        "kind": "flood_zone",
        "truth": {"kind": "flood_zone", "zones": FEMA_ZONES[place]["zones"], "source": "FEMA NFHL MapServer"},
        "expected_agents": ["fema"],
        "topology": "linear",
        "tracks": [T(query, [["fema"]], fema=("zone", place))],
        "consolidators": {},
        "merge": None,
        "answer": zone_answer(place),
        "rubric": zone_rubric(),
        "sub_questions": 1,
    }

SPECS["O03"] = {
    "category": "single_fema_noaa",
    "query": "What are the current water level conditions at San Francisco tide station?",
    "kind": "surge",
    "truth": {"kind": "surge", "value": 1.05, "source": "NOAA CO-OPS real-time"},
    "expected_agents": ["noaa_coops"],
    "topology": "linear",
    "tracks": [T("Current water level conditions at San Francisco tide station", [["noaa_coops"]], noaa_coops=("current", "San Francisco"))],
    "consolidators": {},
    "merge": None,
    "answer": (
        "Current water level at San Francisco is 1.05 m MLLW at NOAA CO-OPS station 9414290, "
        "as of 2026-08-10 17:00 UTC; conditions are within normal tidal range. Source: NOAA CO-OPS real-time data."
    ),
    "rubric": surge_rubric("San Francisco"),
    "sub_questions": 1,
}

# --- Linear NHC -> NOAA surge queries (survey agent joins via rewrite) --------

_LINEAR = [
    ("L01", "What was the storm surge at Galveston during Hurricane Ike in 2008?", "Galveston", "Ike", 2008, 2.44, None),
    ("L02", "What was the peak storm surge at The Battery, New York during Hurricane Sandy in 2012?", "The Battery", "Sandy", 2012, 2.81, None),
    ("L03", "What was the storm surge at Grand Isle during Hurricane Katrina in 2005?", "Grand Isle", "Katrina", 2005, 2.5, 2.49),
    ("L04", "What was the storm surge at Key West during Hurricane Irma in 2017?", "Key West", "Irma", 2017, 0.98, None),
    ("L05", "What was the observed storm surge at Sabine Pass during Hurricane Ike?", "Sabine Pass", "Ike", 2008, 3.90, None),
    ("L06", "What was the storm surge at Dauphin Island during Hurricane Katrina?", "Dauphin Island", "Katrina", 2005, 1.64, None),
    ("L07", "What was the storm surge at Virginia Key, Miami during Hurricane Irma?", "Virginia Key", "Irma", 2017, 0.61, None),
    ("L08", "What was the observed storm surge at Sewells Point, Virginia during Hurricane Isabel in 2003?", "Sewells Point", "Isabel", 2003, 1.46, None),
]

for qid, query, place, storm, year, truth_v, answer_v in _LINEAR:
    rubric = surge_rubric(place)
    if qid == "L05":
        rubric[0] = {"name": "station_id", "pattern": "Sabine Pass"}
    extra = ""
    if qid == "L03":
        extra = " The gauge failed near landfall, so the peak is reconstructed from the partial record and nearby marks."
    if qid == "L05":
        extra = " That is 12.79 ft, surveyed at Sabine Pass North (TCR AL092008)."
    SPECS[qid] = {
        "category": "linear_nhc_noaa",
        "query": query,
        "kind": "surge",
        "truth": {"kind": "surge", "value": truth_v, "source": "NOAA CO-OPS / NHC TCR"},
        "expected_agents": ["nhc", "noaa_coops"],
        "topology": "linear",
        "tracks": [
            T(
                query,
                [["nhc"], ["noaa_coops"]],
                nhc=("track", storm, year),
                noaa_coops=("surge", place, storm, WINDOWS[storm]),
                usgs=("hwm", storm, place),
            )
        ],
        "consolidators": {0: fuse_surge_track(place, storm, include_utc=False)},
        "merge": None,
        "answer": surge_answer(place, storm, year, answer_v, extra),
        "rubric": rubric,
        "sub_questions": 1,
    }

# --- Linear NHC -> NOAA+USGS queries (marks requested explicitly) -------------

_M = [
    ("M01", "What was the observed storm surge and high water marks near Fort Myers during Hurricane Ian in 2022?", "Fort Myers", "Ian", 2022, 2.21, 4.20, "255 marks across Lee County reached 4.20 m NAVD88 (mean 2.81 m)"),
    ("M02", "What were the storm surge observations and surveyed peak water levels at Galveston during Hurricane Ike?", "Galveston", "Ike", 2008, 2.44, 6.1, "marks on Galveston Island and Bolivar Peninsula span 4.6-6.1 m NAVD88"),
    ("M03", "What was the observed storm surge and high water marks near Naples during Hurricane Ian?", "Naples", "Ian", 2022, 1.95, 2.90, "88 marks in Collier County reached 2.90 m NAVD88"),
    ("M04", "What were the observed surge and surveyed peak water levels near Pensacola during Hurricane Ivan in 2004?", "Pensacola", "Ivan", 2004, 2.95, 4.0, "marks peak near 4.00 m within the 3-5 m band east of the eye"),
    ("M05", "What were the observed surge and high water marks during Hurricane Sandy at Kings Point, New York?", "Kings Point", "Sandy", 2012, 3.56, 3.8, "marks near 3.80 m NAVD88 at the western Long Island Sound head"),
]

for qid, query, place, storm, year, gauge_v, hwm_v, hwm_text in _M:
    st = STATIONS[place]
    SPECS[qid] = {
        "category": "linear_nhc_nu",
        "query": query,
        "kind": "multi",
        "truth": {
            "kind": "multi",
            "parts": [
                {"kind": "surge", "value": gauge_v, "source": "NOAA CO-OPS"},
                {"kind": "surge", "value": hwm_v, "source": "USGS HWM survey"},
            ],
            "source": "NHC TCR / USGS",
        },
        "expected_agents": ["nhc", "noaa_coops", "usgs"],
        "topology": "linear",
        "tracks": [
            T(
                query,
                [["nhc"], ["noaa_coops", "usgs"]],
                nhc=("track", storm, year),
                noaa_coops=("surge", place, storm, WINDOWS[storm]),
                usgs=("hwm", storm, place),
            )
        ],
        "consolidators": {0: fuse_surge_track(place, storm, include_utc=True, reconcile=True)},
        "merge": None,
        "answer": (
            f"1. Gauge: peak surge {gauge_v:.2f} m above predicted tide at NOAA CO-OPS station {st['id']} "
            f"({st['name']}, {st['datum']} datum), peak at {SURGES[(place, storm)]['peak_utc']}. "
            f"2. Survey: USGS {hwm_text}. The gauge reads stillwater surge while surveyed marks include run-up: "
            f"complementary, not contradictory. Sources: NOAA CO-OPS and USGS."
        ),
        "rubric": surge_rubric(place) + [{"name": "survey_source", "pattern": "USGS"}],
        "sub_questions": 1,
    }

# --- Parallel-track queries ----------------------------------------------------

def _surge_track(place: str, storm: str, year: int) -> dict:
    return T(
        f"Observed storm surge at {place} during Hurricane {storm} in {year}",
        [["nhc"], ["noaa_coops"]],
        nhc=("track", storm, year),
        noaa_coops=("surge", place, storm, WINDOWS[storm]),
        usgs=("hwm", storm, place),
    )


def _count_track(year: int, which: str) -> dict:
    noun = "Named storms" if which == "named" else "Hurricanes"
    return T(f"{noun} in the {year} Atlantic season", [["nhc"]], nhc=("totals", year, which))


def _category_track(storm: str, year: int, peak: bool = False) -> dict:
    goal = f"Peak intensity of Hurricane {storm} ({year})" if peak else f"Landfall category of Hurricane {storm} ({year})"
    return T(goal, [["nhc"]], nhc=("category", storm, year, peak))


def _zone_track(place: str) -> dict:
    return T(f"FEMA flood zones for {place}", [["fema"]], fema=("zone", place))


def _numbered(*parts: str) -> str:
    return "\n".join(f"{i + 1}. {p}" for i, p in enumerate(parts))


def _merge_text(*track_summaries: str, include_utc_note: str = "") -> str:
    body = "\n".join(f"Track {i}: {s}" for i, s in enumerate(track_summaries))
    return f"Merged track findings.\n{body}\n{include_utc_note}".strip()


_PARALLEL = {
    "P01": {
        "query": "What was the storm surge at Galveston during Hurricane Ike in 2008, and what are the FEMA flood zones for Miami Beach?",
        "tracks": [_surge_track("Galveston", "Ike", 2008), _zone_track("Miami Beach")],
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "parts": [{"kind": "surge", "value": 2.44}, {"kind": "flood_zone", "zones": ["AE", "VE"]}],
        "consolidators": {0: fuse_surge_track("Galveston", "Ike", include_utc=False)},
        "merge": _merge_text(
            "Ike (2008) surge at Galveston 2.44 m above predicted tide, station 8771450, NAVD88, NOAA CO-OPS; USGS marks 4.6-6.1 m.",
            "Miami Beach: FEMA NFHL Zone AE and Zone VE, BFE 2.74-4.57 m NGVD29.",
        ),
        "answer": _numbered(
            surge_answer("Galveston", "Ike", 2008),
            zone_answer("Miami Beach"),
        ),
        "rubric": surge_rubric("Galveston", "q1_") + zone_rubric("q2_"),
    },
    "P02": {
        "query": "How many named storms were in the 2005 season, and what was the peak surge at The Battery during Hurricane Sandy?",
        "tracks": [_count_track(2005, "named"), _surge_track("The Battery", "Sandy", 2012)],
        "expected_agents": ["nhc", "noaa_coops"],
        "parts": [{"kind": "count", "value": 28}, {"kind": "surge", "value": 2.81}],
        "consolidators": {1: fuse_surge_track("The Battery", "Sandy", include_utc=False)},
        "merge": _merge_text(
            "2005 season: 28 named storms (HURDAT2).",
            "Sandy surge at The Battery 2.81 m, station 8518750, NAVD88, NOAA CO-OPS.",
        ),
        "answer": _numbered(count_answer(2005, "named"), surge_answer("The Battery", "Sandy", 2012)),
        "rubric": count_rubric(2005, "q1_") + surge_rubric("The Battery", "q2_"),
    },
    "P03": {
        "query": "What category was Hurricane Harvey at landfall, and what are the FEMA flood zones near Corpus Christi, Texas?",
        "tracks": [_category_track("Harvey", 2017), _zone_track("Corpus Christi")],
        "expected_agents": ["nhc", "fema"],
        "parts": [{"kind": "category", "label": "Cat 4"}, {"kind": "flood_zone", "zones": ["VE", "AE"]}],
        "consolidators": {},
        "merge": _merge_text(
            "Harvey landfall: Category 4, 115 kt (TCR AL092017).",
            "Corpus Christi: FEMA NFHL Zone VE and Zone AE.",
        ),
        "answer": _numbered(category_answer("Harvey", 2017), zone_answer("Corpus Christi")),
        "rubric": category_rubric("Harvey", 2017, "q1_") + zone_rubric("q2_"),
    },
    "P04": {
        "query": "What was the storm surge at Key West during Irma in 2017, and how many hurricanes were in the 2017 season?",
        "tracks": [_surge_track("Key West", "Irma", 2017), _count_track(2017, "hurricanes")],
        "expected_agents": ["nhc", "noaa_coops"],
        "parts": [{"kind": "surge", "value": 0.98}, {"kind": "count", "value": 10}],
        "consolidators": {0: fuse_surge_track("Key West", "Irma", include_utc=False)},
        "merge": _merge_text(
            "Irma surge at Key West 0.98 m, station 8724580, NAVD88, NOAA CO-OPS.",
            "2017 season: 10 hurricanes (HURDAT2).",
        ),
        "answer": _numbered(surge_answer("Key West", "Irma", 2017), count_answer(2017, "hurricanes")),
        "rubric": surge_rubric("Key West", "q1_") + count_rubric(2017, "q2_"),
    },
    "P05": {
        "query": "What was the storm surge at Dauphin Island during Katrina, and what are the FEMA flood zones for Galveston?",
        "tracks": [_surge_track("Dauphin Island", "Katrina", 2005), _zone_track("Galveston")],
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "parts": [{"kind": "surge", "value": 1.64}, {"kind": "flood_zone", "zones": ["VE", "AE"]}],
        "consolidators": {0: fuse_surge_track("Dauphin Island", "Katrina", include_utc=False)},
        "merge": _merge_text(
            "Katrina surge at Dauphin Island 1.64 m, station 8735180, NAVD88, NOAA CO-OPS; USGS marks near 2.0 m.",
            "Galveston: FEMA NFHL Zone VE and Zone AE.",
        ),
        "answer": _numbered(surge_answer("Dauphin Island", "Katrina", 2005), zone_answer("Galveston")),
        "rubric": surge_rubric("Dauphin Island", "q1_") + zone_rubric("q2_"),
    },
    "P06": {
        "query": "What category was Hurricane Ike at landfall, and what was the storm surge at The Battery during Sandy?",
        "tracks": [_category_track("Ike", 2008), _surge_track("The Battery", "Sandy", 2012)],
        "expected_agents": ["nhc", "noaa_coops"],
        "parts": [{"kind": "category", "label": "Cat 2"}, {"kind": "surge", "value": 2.81}],
        "consolidators": {1: fuse_surge_track("The Battery", "Sandy", include_utc=False)},
        "merge": _merge_text(
            "Ike landfall: Category 2, 95 kt (TCR AL092008).",
            "Sandy surge at The Battery 2.81 m, station 8518750, NAVD88, NOAA CO-OPS.",
        ),
        "answer": _numbered(category_answer("Ike", 2008), surge_answer("The Battery", "Sandy", 2012)),
        "rubric": category_rubric("Ike", 2008, "q1_") + surge_rubric("The Battery", "q2_"),
    },
    "P07": {
        "query": "How many named storms were in the 2020 season, and what are the FEMA flood zones for Charleston?",
        "tracks": [_count_track(2020, "named"), _zone_track("Charleston")],
        "expected_agents": ["nhc", "fema"],
        "parts": [{"kind": "count", "value": 30}, {"kind": "flood_zone", "zones": ["AE", "VE"]}],
        "consolidators": {},
        "merge": _merge_text(
            "2020 season: 30 named storms (HURDAT2).",
            "Charleston: FEMA NFHL Zone AE and Zone VE.",
        ),
        "answer": _numbered(count_answer(2020, "named"), zone_answer("Charleston")),
        "rubric": count_rubric(2020, "q1_") + zone_rubric("q2_"),
    },
}

for qid, p in _PARALLEL.items():
    SPECS[qid] = {
        "category": "parallel_2track",
        "query": p["query"],
        "kind": "multi",
        "truth": {"kind": "multi", "parts": p["parts"], "source": "see sub-parts"},
        "expected_agents": p["expected_agents"],
        "topology": "parallel_tracks",
        "tracks": p["tracks"],
        "consolidators": p["consolidators"],
        "merge": p["merge"],
        "answer": p["answer"],
        "rubric": p["rubric"],
        "sub_questions": 2,
    }

_COMPLEX = {
    "C01": {
        "query": "What was the observed storm surge at Galveston during Hurricane Ike in 2008, and how many named storms were in the 2005 Atlantic season, and what are the FEMA flood zones for Tampa?",
        "tracks": [_surge_track("Galveston", "Ike", 2008), _count_track(2005, "named"), _zone_track("Tampa")],
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "parts": [{"kind": "surge", "value": 2.44}, {"kind": "count", "value": 28}, {"kind": "flood_zone", "zones": ["AE"]}],
        "consolidators": {0: fuse_surge_track("Galveston", "Ike", include_utc=True)},
        "merge": _merge_text(
            "Ike surge at Galveston 2.44 m above predicted tide, station 8771450, NAVD88, peak 2008-09-13 07:00 UTC, NOAA CO-OPS; USGS marks 4.6-6.1 m.",
            "2005 season: 28 named storms (HURDAT2, 2005).",
            "Tampa: FEMA NFHL Zone AE, BFE 2.4-3.4 m NGVD29.",
        ),
        "answer": _numbered(
            surge_answer("Galveston", "Ike", 2008),
            count_answer(2005, "named"),
            zone_answer("Tampa"),
        ),
        "rubric": surge_rubric("Galveston", "q1_") + count_rubric(2005, "q2_") + zone_rubric("q3_"),
    },
    "C02": {
        "query": "What was the storm surge at The Battery during Sandy, and what category was Hurricane Michael at landfall, and what is the FEMA flood zone for Miami Beach?",
        "tracks": [_surge_track("The Battery", "Sandy", 2012), _category_track("Michael", 2018), _zone_track("Miami Beach")],
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "parts": [{"kind": "surge", "value": 2.81}, {"kind": "category", "label": "Cat 5"}, {"kind": "flood_zone", "zones": ["AE", "VE"]}],
        "consolidators": {0: fuse_surge_track("The Battery", "Sandy", include_utc=True)},
        "merge": _merge_text(
            "Sandy surge at The Battery 2.81 m, station 8518750, NAVD88, peak 2012-10-29 21:24 UTC, NOAA CO-OPS.",
            "Michael landfall: Category 5, 140 kt (TCR AL142018).",
            "Miami Beach: FEMA NFHL Zone AE and Zone VE.",
        ),
        "answer": _numbered(
            surge_answer("The Battery", "Sandy", 2012),
            category_answer("Michael", 2018),
            zone_answer("Miami Beach"),
        ),
        "rubric": surge_rubric("The Battery", "q1_") + category_rubric("Michael", 2018, "q2_") + zone_rubric("q3_"),
    },
    "C03": {
        "query": "What was the surge at Key West during Irma, and how many hurricanes were in the 2017 season, and what are the FEMA flood zones for Galveston?",
        "tracks": [_surge_track("Key West", "Irma", 2017), _count_track(2017, "hurricanes"), _zone_track("Galveston")],
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "parts": [{"kind": "surge", "value": 0.98}, {"kind": "count", "value": 10}, {"kind": "flood_zone", "zones": ["VE", "AE"]}],
        "consolidators": {0: fuse_surge_track("Key West", "Irma", include_utc=True)},
        "merge": _merge_text(
            "Irma surge at Key West 0.98 m, station 8724580, NAVD88, peak 2017-09-10 12:30 UTC, NOAA CO-OPS.",
            "2017 season: 10 hurricanes (HURDAT2, 2017).",
            "Galveston: FEMA NFHL Zone VE and Zone AE.",
        ),
        "answer": _numbered(
            surge_answer("Key West", "Irma", 2017),
            count_answer(2017, "hurricanes"),
            zone_answer("Galveston"),
        ),
        "rubric": surge_rubric("Key West", "q1_") + count_rubric(2017, "q2_") + zone_rubric("q3_"),
    },
    "C04": {
        "query": "What category was Harvey at landfall in 2017, and what was the storm surge at Dauphin Island during Katrina, and what are the FEMA flood zones for Tampa?",
        "tracks": [_category_track("Harvey", 2017), _surge_track("Dauphin Island", "Katrina", 2005), _zone_track("Tampa")],
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "parts": [{"kind": "category", "label": "Cat 4"}, {"kind": "surge", "value": 1.64}, {"kind": "flood_zone", "zones": ["AE"]}],
        "consolidators": {1: fuse_surge_track("Dauphin Island", "Katrina", include_utc=True)},
        "merge": _merge_text(
            "Harvey landfall: Category 4, 115 kt (TCR AL092017).",
            "Katrina surge at Dauphin Island 1.64 m, station 8735180, NAVD88, peak 2005-08-29 10:30 UTC, NOAA CO-OPS.",
            "Tampa: FEMA NFHL Zone AE.",
        ),
        "answer": _numbered(
            category_answer("Harvey", 2017),
            surge_answer("Dauphin Island", "Katrina", 2005),
            zone_answer("Tampa"),
        ),
        "rubric": category_rubric("Harvey", 2017, "q1_") + surge_rubric("Dauphin Island", "q2_") + zone_rubric("q3_"),
    },
    "C05": {
        "query": "What was the surge at Galveston during Ike, and what category was Hurricane Katrina at peak intensity, and what are the FEMA flood zones for Charleston?",
        "tracks": [_surge_track("Galveston", "Ike", 2008), _category_track("Katrina", 2005, peak=True), _zone_track("Charleston")],
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "parts": [{"kind": "surge", "value": 2.44}, {"kind": "category", "label": "Cat 5"}, {"kind": "flood_zone", "zones": ["AE", "VE"]}],
        "consolidators": {0: fuse_surge_track("Galveston", "Ike", include_utc=True)},
        "merge": _merge_text(
            "Ike surge at Galveston 2.44 m, station 8771450, NAVD88, peak 2008-09-13 07:00 UTC, NOAA CO-OPS.",
            "Katrina peak intensity: Category 5, 150 kt (TCR AL122005).",
            "Charleston: FEMA NFHL Zone AE and Zone VE.",
        ),
        "answer": _numbered(
            surge_answer("Galveston", "Ike", 2008),
            category_answer("Katrina", 2005, peak=True),
            zone_answer("Charleston"),
        ),
        "rubric": surge_rubric("Galveston", "q1_") + category_rubric("Katrina", 2005, "q2_") + zone_rubric("q3_"),
    },
}

for qid, p in _COMPLEX.items():
    SPECS[qid] = {
        "category": "complex_3track",
        "query": p["query"],
        "kind": "multi",
        "truth": {"kind": "multi", "parts": p["parts"], "source": "see sub-parts"},
        "expected_agents": p["expected_agents"],
        "topology": "parallel_tracks",
        "tracks": p["tracks"],
        "consolidators": p["consolidators"],
        "merge": p["merge"],
        "answer": p["answer"],
        "rubric": p["rubric"],
        "sub_questions": 3,
    }

BENCHMARK_IDS = [f"S{i:02d}" for i in range(1, 8)] + [f"O{i:02d}" for i in range(1, 6)] + [
    f"L{i:02d}" for i in range(1, 9)
] + [f"M{i:02d}" for i in range(1, 6)] + [f"P{i:02d}" for i in range(1, 8)] + [f"C{i:02d}" for i in range(1, 6)]
ABLATION_SUBSET = ["S02", "L01", "L03", "M01", "O01", "P01", "C01"]


# ---------------------------------------------------------------------------
# Scenario assembly engine
# ---------------------------------------------------------------------------


def _plan_doc(spec: dict) -> dict:
    return {
        "topology": spec["topology"],
        "tracks": [{"goal": t["goal"], "layers": t["layers"]} for t in spec["tracks"]],
        "rationale": "scripted",
    }


def _compiled_leg(spec: dict):
    plan = parse_plan(_plan_doc(spec))
    features = extract_features(spec["query"], PATTERNS)
    plan2, _ = rewrite_with_heuristics(plan, features, REGISTRY, patterns=PATTERNS)
    return compile_leg(plan2, REGISTRY)


def _fusion_nodes(leg) -> list[tuple]:
    """(node, kind, n_inputs) for every fusion node, executor-order."""
    out = []
    for ti in range(leg.track_count):
        pending = 0
        pending_nonimg = 0
        for group in leg.layers_of_track(ti):
            kinds = {n.kind for n in group}
            if kinds == {K_SPECIALIST}:
                n_img = sum(1 for n in group if REGISTRY.agent(n.agent_id).produces_images)
                pending = len(group)
                pending_nonimg = len(group) - n_img
            elif kinds == {K_IMAGE}:
                out.append((group[0], "image", pending))
                pending = pending_nonimg + 1
            elif kinds == {K_CONSOLIDATOR}:
                out.append((group[0], "consolidator", pending))
                pending = 1
    return out


def build_scenario(
    qid: str,
    spec: dict,
    usage: dict[str, tuple[int, int]],
    include_architect: bool = True,
    overrides: dict | None = None,
    fault_agent: str | None = None,
    fault_final: str | None = None,
) -> dict:
    overrides = overrides or {}
    leg = _compiled_leg(spec)
    entries: list[dict] = []
    if include_architect:
        entries.append(architect_entry(_plan_doc(spec), usage["architect"]))

    specialist_nodes = [n for n in leg.nodes if n.kind == K_SPECIALIST]
    node_budgets = split_usage(usage["specialist"], len(specialist_nodes))
    for node, budget in zip(specialist_nodes, node_budgets):
        tasks = spec["tracks"][node.track_index]["tasks"]
        task = tasks.get(node.agent_id)
        assert task is not None, f"{qid}: no task for {node.node_id}"
        if task[0] == "surge_gap":
            place, storm, window, alt_window = task[1], task[2], task[3], task[4]
            st = STATIONS[place]
            calls_a = [
                {"name": "noaa_search_stations", "arguments": {"name": place}},
                {"name": "noaa_compute_surge", "arguments": {"station_id": st["id"], "begin_date": window.split("/")[0], "end_date": window.split("/")[1]}},
            ]
            calls_b = [
                {"name": "noaa_compute_surge", "arguments": {"station_id": st["id"], "begin_date": alt_window.split("/")[0], "end_date": alt_window.split("/")[1]}},
            ]
            obs = SURGES[(place, storm)]
            brief = (
                f"{sentinel(node.node_id)}\n"
                f"The gauge record at station {st['id']} ({st['name']}, {st['datum']}) has a gap near landfall; "
                f"an extended search reconstructs a peak surge near {obs['value']:.2f} m above predicted tide "
                f"around {obs['peak_utc']}. Source: NOAA CO-OPS."
            )
            if fault_agent == node.agent_id and fault_final:
                brief = fault_final
            register_call_fixtures(calls_a)
            register_call_fixtures(calls_b)
            parts = split_usage(budget, 3)
            nid = node.node_id.replace(".", chr(92) + ".")
            entries += [
                {"match": {"stage": "specialist", "pattern": rf"(?s)rounds=0\n.*\[node {nid}\]"},
                 "respond": {"content": "", "tool_calls": calls_a, "usage": {"input_tokens": parts[0][0], "output_tokens": parts[0][1]}}},
                {"match": {"stage": "specialist", "pattern": rf"(?s)rounds=2\n.*\[node {nid}\]"},
                 "respond": {"content": "", "tool_calls": calls_b, "usage": {"input_tokens": parts[1][0], "output_tokens": parts[1][1]}}},
                {"match": {"stage": "specialist", "pattern": rf"(?s)rounds=3\n.*\[node {nid}\]"},
                 "respond": {"content": brief, "usage": {"input_tokens": parts[2][0], "output_tokens": parts[2][1]}}},
            ]
            continue
        calls, brief = run_task(task, node.node_id)
        if fault_agent == node.agent_id and fault_final:
            brief = f"{sentinel(node.node_id)}\n{fault_final}"
        if calls:
            register_call_fixtures(calls)
            entries += specialist_entries(node.node_id, calls, brief, split_usage(budget, 2))
        else:
            entries += direct_specialist_entry(node.node_id, brief, budget)

    fusions = _fusion_nodes(leg)
    model_fusions = [(n, k) for n, k, n_in in fusions if k == "image" or n_in >= 2]
    has_merge = leg.track_count >= 2
    n_calls = len(model_fusions) + (1 if has_merge else 0)
    budgets = split_usage(usage["consolidator"], n_calls) if n_calls else []
    bi = 0
    for node, kind in model_fusions:
        if kind == "image":
            text = overrides.get(f"image:{node.track_index}", spec.get("images", {})[node.track_index])
            entries.append(image_entry(node.node_id, text, budgets[bi]))
        else:
            text = overrides.get(f"consolidator:{node.track_index}", spec["consolidators"][node.track_index])
            entries.append(consolidator_entry(node.node_id, text, budgets[bi]))
        bi += 1
    if has_merge:
        entries.append(merge_entry(overrides.get("merge", spec["merge"]), budgets[bi]))
    entries.append(reporter_entry(overrides.get("reporter", spec["answer"]), usage["reporter"]))
    return {"exchanges": entries}


def entry_doc(qid: str, spec: dict, scenario_name: str | None = None) -> dict:
    return {
        "id": qid,
        "query": spec["query"],
        "category": spec["category"],
        "kind": spec["kind"],
        "expected_topology": spec["topology"],
        "expected_agents": sorted(spec["expected_agents"]),
        "ground_truth": spec["truth"],
        "rubric": spec["rubric"],
        "scenario_script": f"scenarios/{scenario_name or qid}.json",
        "fixtures_ref": "fixtures/world.json",
        "sub_questions": spec["sub_questions"],
    }


# ---------------------------------------------------------------------------
# Ablation variant content
# ---------------------------------------------------------------------------


def technical_fused(place: str, storm: str, value: float) -> str:
    st = STATIONS[place]
    obs = SURGES[(place, storm)]
    return (
        f"Fused technical brief: gauge anomaly approximately {value:.2f} m above predicted tide at station "
        f"{st['id']} ({st['name']}), {st['datum']} datum, peak {obs['peak_utc']}, NOAA CO-OPS preliminary; "
        f"{hwm_sentence(storm, place)}. Sources: NOAA CO-OPS and USGS."
    )


NO_REPORTER_OVERRIDES = {
    "L01": {"consolidator:0": technical_fused("Galveston", "Ike", 2.30)},
    "L03": {"consolidator:0": technical_fused("Grand Isle", "Katrina", 2.30)},
    "M01": {"consolidator:0": technical_fused("Fort Myers", "Ian", 2.30)},
    "P01": {
        "merge": _merge_text(
            "Ike (2008) gauge anomaly approximately 2.30 m at station 8771450, NAVD88 datum, peak 2008-09-13 07:00 UTC, NOAA CO-OPS; USGS marks 4.6-6.1 m.",
            "Miami Beach: FEMA NFHL Zone AE and Zone VE, BFE 2.74-4.57 m NGVD29.",
        )
    },
    "C01": {
        "merge": _merge_text(
            "Ike gauge anomaly approximately 2.30 m at station 8771450, NAVD88, peak 2008-09-13 07:00 UTC, NOAA CO-OPS; USGS marks 4.6-6.1 m.",
            "2005 season: 28 named storms (HURDAT2, 2005).",
            "Tampa: FEMA NFHL Zone AE, BFE 2.4-3.4 m NGVD29.",
        )
    },
}

NO_CONSOLIDATION_OVERRIDES = {
    "L01": {"reporter": surge_answer("Galveston", "Ike", 2008, 2.39)},
    "L03": {"reporter": surge_answer("Grand Isle", "Katrina", 2005, 2.40)},
    "M01": {
        "reporter": (
            "1. Gauge: peak surge 2.10 m above predicted tide at NOAA CO-OPS station 8725520 (Fort Myers, NAVD88). "
            "2. Survey: USGS marks across Lee County reached 4.20 m NAVD88. Sources: NOAA CO-OPS and USGS."
        )
    },
    "P01": {
        "reporter": _numbered(
            surge_answer("Galveston", "Ike", 2008, 2.39),
            zone_answer("Miami Beach"),
        )
    },
    "C01": {
        "reporter": _numbered(
            surge_answer("Galveston", "Ike", 2008, 2.39),
            count_answer(2005, "named"),
            zone_answer("Tampa"),
        )
    },
}

# Fixed-graph pipeline: every subset query forced through the same three layers.

_FG_CARRY = {
    "S02": "Carrying forward: Hurricane Michael made landfall as Category 5, 140 kt (NHC AL142018, 2018). No flood-map location applies to this goal.",
    "O01": None,  # fema is the relevant agent here
    "L01": "Carrying forward: gauge surge 2.39 m at station 8771450 (NAVD88, NOAA CO-OPS); marks 4.6-6.1 m. No flood-map request in this goal.",
    "L03": "Carrying forward: reconstructed gauge surge roughly 2.3 m at station 8761724 (NAVD88, NOAA CO-OPS; gauge gap). No flood-map request in this goal.",
    "M01": "Carrying forward: gauge surge 2.00 m at station 8725520 (NAVD88, NOAA CO-OPS); USGS marks to 4.20 m. No flood-map request in this goal.",
    "P01": None,
    "C01": None,
}

FIXED_ANSWERS = {
    "S02": category_answer("Michael", 2018),
    "O01": zone_answer("Miami Beach"),
    "L01": surge_answer("Galveston", "Ike", 2008, 2.39),
    "L03": surge_answer("Grand Isle", "Katrina", 2005, 2.30, " The record has a gap near landfall."),
    "M01": (
        "Gauge surge about 2.00 m at NOAA CO-OPS station 8725520 (Fort Myers, NAVD88); USGS marks reached "
        "4.20 m NAVD88 in Lee County. Sources: NOAA CO-OPS and USGS."
    ),
    "P01": (
        "The peak storm surge at Galveston during Hurricane Ike (2008) was 2.44 m above predicted tide at "
        "NOAA CO-OPS station 8771450 (NAVD88 datum). The flood-map portion of the request was not addressed "
        "by this pipeline run. Source: NOAA CO-OPS."
    ),
    "C01": (
        "The observed storm surge at Galveston during Hurricane Ike was 2.44 m above predicted tide at "
        "NOAA CO-OPS station 8771450 (NAVD88 datum). The season-count and flood-map portions of the request "
        "were not addressed by this pipeline run. Source: NOAA CO-OPS."
    ),
}


def fixed_graph_spec(qid: str) -> dict:
    base = SPECS[qid]
    q = base["query"]
    if qid == "S02":
        nhc_task = ("category", "Michael", 2018)
        noaa_task = ("direct", "No station or water-level request in this goal. Context noted: Michael landfall category question.")
        usgs_task = ("direct", "No flood-event survey data relevant to this goal.")
        fema_task = ("direct", _FG_CARRY["S02"])
        cons = "Neither gauge observations nor survey marks apply; carrying forward: Michael made landfall as Category 5 (140 kt, NHC AL142018, 2018)."
    elif qid == "O01":
        nhc_task = ("direct", "No tropical-cyclone question in this goal; no track data needed.")
        noaa_task = ("direct", "No station or water-level request in this goal.")
        usgs_task = ("direct", "No flood-event survey data relevant to this goal.")
        fema_task = ("zone", "Miami Beach")
        cons = "Neither gauge observations nor survey marks apply to this flood-map goal; awaiting regulatory lookup."
    elif qid in ("L01", "P01", "C01"):
        nhc_task = ("track", "Ike", 2008)
        noaa_task = ("surge", "Galveston", "Ike", WINDOWS["Ike"])
        usgs_task = ("hwm", "Ike", "Galveston")
        fema_task = ("zone", "Miami Beach") if qid == "P01" else (("zone", "Tampa") if qid == "C01" else ("direct", _FG_CARRY["L01"]))
        cons = fuse_surge_track("Galveston", "Ike", include_utc=False)
    elif qid == "L03":
        nhc_task = ("track", "Katrina", 2005)
        noaa_task = ("surge", "Grand Isle", "Katrina", WINDOWS["Katrina"])
        usgs_task = ("hwm", "Katrina", "Grand Isle")
        fema_task = ("direct", _FG_CARRY["L03"])
        cons = fuse_surge_track("Grand Isle", "Katrina", include_utc=False)
    elif qid == "M01":
        nhc_task = ("track", "Ian", 2022)
        noaa_task = ("surge", "Fort Myers", "Ian", WINDOWS["Ian"])
        usgs_task = ("hwm", "Ian", "Fort Myers")
        fema_task = ("direct", _FG_CARRY["M01"])
        cons = fuse_surge_track("Fort Myers", "Ian", include_utc=False)
    else:
        raise KeyError(qid)
    return {
        "category": base["category"],
        "query": q,
        "kind": base["kind"],
        "truth": base["truth"],
        "expected_agents": base["expected_agents"],
        "topology": "linear",
        "tracks": [
            T("", [["nhc"], ["noaa_coops", "usgs"], ["fema"]], nhc=nhc_task, noaa_coops=noaa_task, usgs=usgs_task, fema=fema_task)
        ],
        "consolidators": {0: cons},
        "merge": None,
        "answer": FIXED_ANSWERS[qid],
        "rubric": base["rubric"],
        "sub_questions": base["sub_questions"],
    }


# ---------------------------------------------------------------------------
# Paraphrase, adversarial, fault, scaling, and demo fixtures
# ---------------------------------------------------------------------------


def _variant_of(base_id: str, suffix: str, query: str, **changes) -> tuple[str, dict]:
    spec = {**SPECS[base_id]}
    spec["query"] = query
    spec["tracks"] = changes.get("tracks", spec["tracks"])
    spec["answer"] = changes.get("answer", spec["answer"])
    spec["merge"] = changes.get("merge", spec["merge"])
    spec["consolidators"] = changes.get("consolidators", spec["consolidators"])
    return f"{base_id}{suffix}", spec


PARAPHRASES: dict[str, list[tuple[str, dict]]] = {
    "L01": [
        _variant_of("L01", "a", SPECS["L01"]["query"]),
        _variant_of("L01", "b", "How high did the water surge get in Galveston, TX when Ike hit in 2008?"),
        _variant_of(
            "L01",
            "c",
            "Ike 2008 --- observed surge height at Galveston tide gauge?",
            answer=surge_answer("Galveston", "Ike", 2008, 2.30, " Only the gauge record was requested."),
        ),
    ],
    "S02": [
        _variant_of("S02", "a", SPECS["S02"]["query"]),
        _variant_of("S02", "b", "Michael 2018 --- what Saffir-Simpson category at Florida landfall?"),
        _variant_of("S02", "c", "How strong was Hurricane Michael when it struck the Florida coast in 2018?"),
    ],
    "O01": [
        _variant_of("O01", "a", SPECS["O01"]["query"]),
        _variant_of("O01", "b", "What FEMA NFHL flood zone designation applies to Miami Beach?"),
        _variant_of("O01", "c", "Is Miami Beach in a special flood hazard area? What zones does FEMA show?"),
    ],
    "P01": [
        _variant_of("P01", "a", SPECS["P01"]["query"]),
        _variant_of(
            "P01",
            "b",
            "Two questions: (1) how high was the surge in Galveston from Ike 2008, and (2) what FEMA flood zones cover Miami Beach?",
        ),
        _variant_of(
            "P01",
            "c",
            "I need the Ike 2008 storm surge data for Galveston and also the FEMA flood zone map for Miami Beach.",
            tracks=[
                T(
                    "Storm surge data for Galveston from Ike 2008",
                    [["nhc"], ["noaa_coops"]],
                    nhc=("track", "Ike", 2008),
                    noaa_coops=("surge", "Galveston", "Ike", WINDOWS["Ike"]),
                ),
                _zone_track("Miami Beach"),
            ],
            merge=_merge_text(
                "Ike (2008) gauge surge 2.23 m at station 8771450, NAVD88, NOAA CO-OPS.",
                "Miami Beach: FEMA NFHL Zone AE and Zone VE.",
            ),
            answer=_numbered(
                surge_answer("Galveston", "Ike", 2008, 2.23, " Gauge record only, as requested."),
                zone_answer("Miami Beach"),
            ),
            consolidators={},
        ),
    ],
}

ADVERSARIAL: list[dict] = [
    {
        "id": "ADV1",
        "type": "Wrong location",
        "query": "What was the storm surge at Galveston during Hurricane Sandy in 2012?",
        "topology": "linear",
        "tracks": [
            T(
                "Storm surge at Galveston during Hurricane Sandy in 2012",
                [["nhc"], ["noaa_coops"]],
                nhc=("track", "Sandy", 2012),
                noaa_coops=("surge", "Galveston", "Sandy", "20121028/20121101"),
                usgs=("hwm", "Sandy", "Galveston"),
            )
        ],
        "consolidators": {
            0: (
                "Sandy's track ran up the U.S. East Coast toward New Jersey; the Galveston gauge shows only a "
                "0.18 m background anomaly over the window, and the survey network has no marks on the Texas coast "
                "for this event. Sources: NOAA CO-OPS and USGS."
            )
        },
        "merge": None,
        "answer": (
            "Hurricane Sandy (2012) did not affect Galveston, Texas: its track ran up the U.S. East Coast, "
            "making landfall near Brigantine, New Jersey. The Galveston gauge (8771450) shows only a 0.18 m "
            "background anomaly, and no survey marks exist on the Texas coast for this event. For Sandy's actual "
            "coastal impact, the peak surge was recorded at The Battery, New York. Source: NOAA CO-OPS."
        ),
        "judging": {
            "issue_patterns": [r"did not affect", r"track ran up the East Coast", r"(?i)no .* on the Texas coast"],
            "fabrication_patterns": [r"(?i)surge of \d+(\.\d+)? m (was )?(recorded |observed )?at Galveston during (Hurricane )?Sandy"],
            "response_patterns": [r"\d+(\.\d+)? m", r"\bZone\b", r"Category", r"named storms"],
        },
    },
    {
        "id": "ADV2",
        "type": "Inland location",
        "query": "What was the storm surge in Denver, Colorado?",
        "topology": "linear",
        "tracks": [
            T(
                "Storm surge in Denver, Colorado",
                [["noaa_coops"]],
                noaa_coops=("station_miss", "Denver"),
                usgs=("direct", "No named flood event in this goal to resolve against the survey network."),
            )
        ],
        "consolidators": {0: "No records located for the request."},
        "merge": None,
        "answer": "Water-level records for Denver, Colorado were not located in the station inventory.",
        "judging": {
            "issue_patterns": [r"(?i)\binland\b", r"(?i)no coastal", r"(?i)cannot experience storm surge"],
            "fabrication_patterns": [r"(?i)surge of \d", r"\d+(\.\d+)? m (was )?(recorded|observed)"],
            "response_patterns": [r"\d+(\.\d+)? m", r"\bZone\b", r"Category", r"named storms"],
        },
    },
    {
        "id": "ADV3",
        "type": "Nonexistent storm",
        "query": "What was the surge and category of Hurricane Bob in 2008?",
        "topology": "linear",
        "tracks": [
            T(
                "Surge and category of Hurricane Bob in 2008",
                [["nhc"]],
                nhc=("search_miss", "Bob", 2008),
            )
        ],
        "consolidators": {},
        "merge": None,
        "answer": (
            "No storm named Bob is present in the HURDAT2 Atlantic database for the 2008 season; the most recent "
            "Atlantic Bob was 1991. Neither a surge value nor a category can be reported for a 2008 Bob."
        ),
        "judging": {
            "issue_patterns": [r"(?i)no storm named", r"(?i)not (present|found) in", r"HURDAT2 .* for the 2008 season"],
            "fabrication_patterns": [r"(?i)Category [1-5]", r"\d+(\.\d+)? m (surge|above predicted)"],
            "response_patterns": [r"(?i)HURDAT2", r"(?i)1991"],
        },
    },
    {
        "id": "ADV4",
        "type": "Wrong category",
        "query": "What was the Category 5 storm surge at Galveston during Hurricane Ike in 2008?",
        "topology": "linear",
        "tracks": [
            T(
                "Storm surge at Galveston during Hurricane Ike in 2008",
                [["nhc"], ["noaa_coops"]],
                nhc=("track", "Ike", 2008),
                noaa_coops=("surge", "Galveston", "Ike", WINDOWS["Ike"]),
                usgs=("hwm", "Ike", "Galveston"),
            )
        ],
        "consolidators": {0: fuse_surge_track("Galveston", "Ike", include_utc=True)},
        "merge": None,
        "answer": (
            "A correction first: Hurricane Ike made landfall at Galveston as a Category 2 hurricane (95 kt), "
            "not Category 5. The observed storm surge was 2.44 m above predicted tide at NOAA CO-OPS station "
            "8771450 (NAVD88 datum); USGS high-water marks reached 4.6-6.1 m NAVD88 on the open coast. "
            "Sources: NHC TCR AL092008, NOAA CO-OPS, USGS."
        ),
        "judging": {
            "issue_patterns": [r"(?i)not Category 5", r"(?i)as a Category 2", r"(?i)correction"],
            "fabrication_patterns": [r"(?i)landfall as a Category 5", r"(?i)Category 5 (hurricane )?at landfall"],
            "response_patterns": [r"2\.44 m", r"8771450"],
        },
    },
    {
        "id": "ADV5",
        "type": "Inland FEMA",
        "query": "What are the FEMA coastal flood zones for Omaha, Nebraska?",
        "topology": "linear",
        "tracks": [
            T(
                "FEMA coastal flood zones for Omaha, Nebraska",
                [["fema"]],
                fema=("zone", "Omaha"),
            )
        ],
        "consolidators": {},
        "merge": None,
        "answer": (
            "Omaha, Nebraska lies far inland, so its mapped flood hazards are riverine rather than coastal: the "
            "FEMA NFHL shows Zone AE floodplains along the riverine reaches of the Missouri and Papillion. "
            "No coastal high-hazard (VE) zones exist there. Source: FEMA NFHL MapServer."
        ),
        "judging": {
            "issue_patterns": [r"(?i)riverine", r"(?i)\binland\b"],
            "fabrication_patterns": [r"(?i)coastal (VE|high-hazard) zones? (are|were|is) (mapped|identified|present)"],
            "response_patterns": [r"\bZone\b", r"NFHL"],
        },
    },
]

FAULT_QUERY = "What was the observed storm surge and high water marks at Galveston during Hurricane Ike in 2008?"
FAULT_SPEC = {
    "category": "fault_fixture",
    "query": FAULT_QUERY,
    "kind": "multi",
    "truth": {
        "kind": "multi",
        "parts": [{"kind": "surge", "value": 2.44}, {"kind": "surge", "value": 6.1}],
        "source": "CO-OPS 079",
    },
    "expected_agents": ["nhc", "noaa_coops", "usgs"],
    "topology": "linear",
    "tracks": [
        T(
            FAULT_QUERY,
            [["nhc"], ["noaa_coops"], ["fema"]],
            nhc=("track", "Ike", 2008),
            noaa_coops=("surge", "Galveston", "Ike", WINDOWS["Ike"]),
            usgs=("hwm", "Ike", "Galveston"),
            fema=("zone", "Galveston"),
        )
    ],
    "consolidators": {0: fuse_surge_track("Galveston", "Ike", include_utc=True)},
    "merge": None,
    "answer": (
        "1. Gauge: peak surge 2.44 m above predicted tide at NOAA CO-OPS station 8771450 (Galveston Pier 21, "
        "NAVD88 datum), peak 2008-09-13 07:00 UTC. 2. Survey: USGS marks on Galveston Island and Bolivar "
        "Peninsula span 4.6-6.1 m NAVD88 (event 67). FEMA NFHL maps Zone VE and Zone AE for Galveston. "
        "Sources: NOAA CO-OPS, USGS, FEMA."
    ),
    "rubric": surge_rubric("Galveston") + [{"name": "survey_source", "pattern": "USGS"}],
    "sub_questions": 1,
}

FAULT_FINALS = {
    "noaa_coops": "Gauge service unreachable; no water-level observations were retrieved for this request.",
    "usgs": "Survey service unreachable; no high-water marks were retrieved for this request.",
    "fema": "Flood-map service unreachable; no regulatory flood-zone data was retrieved for this request.",
}

FAULT_CONSOLIDATORS = {
    "noaa_coops": (
        "Track context: Ike made landfall at Galveston 2008-09-13 as Category 2 (95 kt, NHC AL092008). "
        "USGS marks on Galveston Island and Bolivar Peninsula span 4.6-6.1 m NAVD88 (event 67, 231 marks). "
        "The gauge channel contributed nothing this run. Sources: NHC, USGS."
    ),
    "usgs": (
        "Track context: Ike landfall Category 2 (NHC AL092008). Gauge surge 2.44 m above predicted tide at "
        "station 8771450 (NAVD88, peak 2008-09-13 07:00 UTC, NOAA CO-OPS). The survey channel was unavailable. "
        "Sources: NHC, NOAA CO-OPS."
    ),
    "fema": fuse_surge_track("Galveston", "Ike", include_utc=True),
}

FAULT_ANSWERS = {
    "noaa_coops": (
        "Hurricane Ike made landfall at Galveston on 2008-09-13 as a Category 2 hurricane (95 kt, NHC AL092008). "
        "USGS surveyed high-water marks on Galveston Island and the Bolivar Peninsula span 4.6-6.1 m NAVD88 "
        "(event 67, 231 marks), indicating open-coast inundation approaching 6 m. Sources: NHC, USGS."
    ),
    "usgs": (
        "The observed storm surge at Galveston during Hurricane Ike was 2.44 m above predicted tide at NOAA "
        "CO-OPS station 8771450 (NAVD88 datum, peak 2008-09-13 07:00 UTC). The USGS high-water-mark service was "
        "unavailable during this run, so surveyed peak elevations could not be retrieved. Sources: NOAA CO-OPS, NHC."
    ),
    "fema": (
        "The observed storm surge at Galveston during Hurricane Ike was 2.44 m above predicted tide at NOAA "
        "CO-OPS station 8771450 (NAVD88 datum); USGS marks span 4.6-6.1 m NAVD88. The FEMA flood-map service was "
        "unavailable, so regulatory context is omitted. Sources: NOAA CO-OPS, USGS, NHC."
    ),
}

X_SPECS = {
    "X401": {
        "category": "scaling_4track",
        "query": (
            "What was the storm surge at Galveston during Ike in 2008, and what category was Hurricane Michael "
            "at landfall, and what are the FEMA flood zones for Miami Beach, and how many named storms were in "
            "the 2020 season?"
        ),
        "kind": "multi",
        "truth": {
            "kind": "multi",
            "parts": [
                {"kind": "surge", "value": 2.44},
                {"kind": "category", "label": "Cat 5"},
                {"kind": "flood_zone", "zones": ["AE", "VE"]},
                {"kind": "count", "value": 30},
            ],
            "source": "see sub-parts",
        },
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "topology": "parallel_tracks",
        "tracks": [
            _surge_track("Galveston", "Ike", 2008),
            _category_track("Michael", 2018),
            _zone_track("Miami Beach"),
            _count_track(2020, "named"),
        ],
        "consolidators": {0: fuse_surge_track("Galveston", "Ike", include_utc=True)},
        "merge": _merge_text(
            "Ike surge at Galveston 2.44 m, station 8771450, NAVD88, NOAA CO-OPS.",
            "Michael landfall: Category 5 (TCR AL142018).",
            "Miami Beach: FEMA NFHL Zone AE and Zone VE.",
            "2020 season: 30 named storms (HURDAT2).",
        ),
        "answer": _numbered(
            surge_answer("Galveston", "Ike", 2008),
            category_answer("Michael", 2018),
            zone_answer("Miami Beach"),
            count_answer(2020, "named"),
        ),
        "rubric": surge_rubric("Galveston", "q1_") + category_rubric("Michael", 2018, "q2_") + zone_rubric("q3_") + count_rubric(2020, "q4_"),
        "sub_questions": 4,
    },
    "X501": {
        "category": "scaling_5track",
        "query": (
            "What was the storm surge at The Battery during Sandy, and what category was Hurricane Harvey at "
            "landfall, and what are the FEMA flood zones for Tampa, and how many hurricanes were in the 2017 "
            "season, and what was the surge at Key West during Irma?"
        ),
        "kind": "multi",
        "truth": {
            "kind": "multi",
            "parts": [
                {"kind": "surge", "value": 2.81},
                {"kind": "category", "label": "Cat 4"},
                {"kind": "flood_zone", "zones": ["AE"]},
                {"kind": "count", "value": 10},
                {"kind": "surge", "value": 0.98},
            ],
            "source": "see sub-parts",
        },
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "topology": "parallel_tracks",
        "tracks": [
            _surge_track("The Battery", "Sandy", 2012),
            _category_track("Harvey", 2017),
            _zone_track("Tampa"),
            _count_track(2017, "hurricanes"),
            _surge_track("Key West", "Irma", 2017),
        ],
        "consolidators": {
            0: fuse_surge_track("The Battery", "Sandy", include_utc=True),
            4: fuse_surge_track("Key West", "Irma", include_utc=True),
        },
        "merge": _merge_text(
            "Sandy surge at The Battery 2.81 m, station 8518750, NAVD88, NOAA CO-OPS.",
            "Harvey landfall: Category 4 (TCR AL092017).",
            "Tampa: FEMA NFHL Zone AE.",
            "2017 season: 10 hurricanes (HURDAT2).",
            "Irma surge at Key West 0.98 m, station 8724580, NAVD88, NOAA CO-OPS.",
        ),
        "answer": _numbered(
            surge_answer("The Battery", "Sandy", 2012),
            category_answer("Harvey", 2017),
            zone_answer("Tampa"),
            count_answer(2017, "hurricanes"),
            surge_answer("Key West", "Irma", 2017),
        ),
        "rubric": surge_rubric("The Battery", "q1_") + category_rubric("Harvey", 2017, "q2_") + zone_rubric("q3_") + count_rubric(2017, "q4_") + surge_rubric("Key West", "q5_"),
        "sub_questions": 5,
    },
}

DEMO_SPECS = {
    "demo_monthly_levels": {
        "category": "demo",
        "query": "What was the maximum water level achieved in each month of 2025 at San Francisco CO-OPS station?",
        "kind": "surge",
        "truth": {"kind": "surge", "value": 2.02, "source": "NOAA CO-OPS monthly extremes"},
        "expected_agents": ["noaa_coops"],
        "topology": "linear",
        "tracks": [T("Monthly maximum water levels for 2025 at the San Francisco station", [["noaa_coops"]], noaa_coops=("sf_monthly",))],
        "consolidators": {},
        "merge": None,
        "answer": (
            "Monthly maximum water levels for 2025 at NOAA CO-OPS station 9414290 (San Francisco, MLLW datum) "
            "ranged from 1.91 m (January) to 2.02 m (December), below the 2.62 m minor flood threshold in every "
            "month. Source: NOAA CO-OPS monthly extremes."
        ),
        "rubric": surge_rubric("San Francisco"),
        "sub_questions": 1,
    },
    "demo_surge_reconciliation": {
        "category": "demo",
        "query": "What was the observed storm surge in Fort Myers during the Hurricane Ian event?",
        "kind": "surge",
        "truth": {"kind": "surge", "value": 2.21, "source": "NOAA CO-OPS"},
        "expected_agents": ["nhc", "noaa_coops", "usgs"],
        "topology": "linear",
        "tracks": [
            T(
                "Observed storm surge in Fort Myers during Hurricane Ian",
                [["noaa_coops"]],
                nhc=("track", "Ian", 2022),
                noaa_coops=("surge", "Fort Myers", "Ian", WINDOWS["Ian"]),
                usgs=("hwm", "Ian", "Fort Myers"),
            )
        ],
        "consolidators": {
            0: (
                "Critical discrepancy, reconciled: the USGS marks (~4.2 m NAVD88) and the CO-OPS gauge "
                "(2.30 m NAVD observed; 2.21 m surge above predicted tide at station 8725520, peak "
                "2022-09-28 22:18 UTC) report different peak elevations for the same storm. The gauge sits "
                "upriver on the Caloosahatchee where the estuary attenuates surge; the marks capture the open "
                "Gulf-facing coast. These datasets are complementary, not contradictory. Sources: NOAA CO-OPS, USGS."
            )
        },
        "merge": None,
        "answer": (
            "Peak storm surge of 2.21 m above predicted tide was recorded at NOAA CO-OPS station 8725520 "
            "(Fort Myers, NAVD88; 2.30 m NAVD observed water level), peaking at 2022-09-28 22:18 UTC. USGS "
            "high-water marks across Lee County reached 4.20 m NAVD88 because open-coast marks include run-up; "
            "the two datasets are complementary, not contradictory. Sources: NOAA CO-OPS, USGS."
        ),
        "rubric": surge_rubric("Fort Myers"),
        "sub_questions": 1,
    },
    "demo_four_tracks": {
        "category": "demo",
        "query": (
            "What is the observed storm surge from Hurricane Ian in Fort Myers, the total number of storms in "
            "HURDAT2 in 2011, the FEMA flood map guidance for Miami for a category 3 storm, and the average "
            "total water level in Seattle in May 2025?"
        ),
        "kind": "multi",
        "truth": {
            "kind": "multi",
            "parts": [
                {"kind": "surge", "value": 2.21},
                {"kind": "count", "value": 20},
                {"kind": "flood_zone", "zones": ["VE", "AE"]},
                {"kind": "surge", "value": 1.312},
            ],
            "source": "see sub-parts",
        },
        "expected_agents": ["nhc", "noaa_coops", "fema"],
        "topology": "parallel_tracks",
        "tracks": [
            T(
                "Observed storm surge from Hurricane Ian in Fort Myers",
                [["nhc"], ["noaa_coops"]],
                nhc=("track", "Ian", 2022),
                noaa_coops=("surge", "Fort Myers", "Ian", WINDOWS["Ian"]),
                usgs=("hwm", "Ian", "Fort Myers"),
            ),
            T("Total number of storms in HURDAT2 in 2011", [["nhc"]], nhc=("totals", 2011, "named")),
            T("FEMA flood map guidance for Miami for a category 3 storm", [["fema"]], fema=("zone", "Miami")),
            T("Average total water level in Seattle in May 2025", [["noaa_coops"]], noaa_coops=("monthly_mean", "Seattle")),
        ],
        "consolidators": {0: fuse_surge_track("Fort Myers", "Ian", include_utc=True, reconcile=True)},
        "merge": _merge_text(
            "Ian surge at Fort Myers 2.21 m, station 8725520, NAVD88, peak 2022-09-28 22:18 UTC, NOAA CO-OPS; USGS marks to 4.20 m.",
            "2011 season: 20 named storms, 4 major (HURDAT2).",
            "Miami point: FEMA NFHL Zone VE and Zone AE, BFE 2.74-4.57 m NGVD29.",
            "Seattle May 2025: mean total water level 1.312 m NAVD (7440 observations).",
        ),
        "answer": (
            "1. Peak storm surge of 2.21 m above predicted tide was recorded at NOAA CO-OPS station 8725520 "
            "(Fort Myers), 2022-09-28 22:18 UTC; USGS high-water marks across Lee County reached 4.20 m NAVD88 "
            "(mean of 255 marks: 2.81 m).\n"
            "2. The Atlantic HURDAT2 database lists 20 named storms in 2011, of which 4 were major hurricanes.\n"
            "3. At the Miami point queried, the effective FEMA NFHL identifies Zone VE and Zone AE special flood "
            "hazard areas with base flood elevations spanning 2.74-4.57 m NGVD29; regulatory values, not "
            "storm-specific predictions.\n"
            "4. The mean total water level at NOAA station 9447130 (Seattle) for May 2025 was 1.312 m NAVD, from "
            "7440 six-minute observations. Sources: NOAA CO-OPS, HURDAT2, FEMA NFHL, USGS."
        ),
        "rubric": surge_rubric("Fort Myers", "q1_") + count_rubric(2011, "q2_") + zone_rubric("q3_") + surge_rubric("Seattle", "q4_"),
        "sub_questions": 4,
    },
    "demo_image_guidance": {
        "category": "demo",
        "query": (
            "Source maximum total water levels produced by Hurricane Helene in Fort Myers from STOFS for "
            "forecast cycle right before US landfall. Please use a 20 km x 20 km bounding box."
        ),
        "kind": "surge",
        "truth": {"kind": "surge", "value": 2.8, "source": "STOFS forecast guidance"},
        "expected_agents": ["stofs", "osm"],
        "topology": "linear",
        "tracks": [
            T(
                "Maximum STOFS total water levels near Fort Myers before Helene landfall",
                [["stofs"]],
                stofs=("stofs", "2024-09-26T12Z", "26.55,-82.05,26.75,-81.85"),
                osm=("osm", "26.55,-82.05,26.75,-81.85"),
            )
        ],
        "consolidators": {},
        "images": {
            0: (
                "Interpreting the STOFS maximum total water level contours against the labeled basemap: peak "
                "values of 2.6-2.9 m concentrate along the barrier islands (Fort Myers Beach, Sanibel) with "
                "2.0-2.4 m inside Estero Bay and attenuation up the Caloosahatchee toward the Fort Myers yacht "
                "basin. Forecast cycle 2024-09-26T12Z, 20 km box centered on Fort Myers."
            )
        },
        "merge": None,
        "answer": (
            "STOFS guidance for forecast cycle 2024-09-26T12Z (the last full cycle before Helene's US landfall) "
            "shows maximum total water levels of 2.6-2.9 m along the Fort Myers barrier coast (Fort Myers Beach, "
            "Sanibel), 2.0-2.4 m in Estero Bay, and lower values upriver, within the requested 20 km x 20 km box. "
            "Source: STOFS-2D-Global forecast guidance interpreted against a labeled basemap."
        ),
        "rubric": [
            {"name": "cycle", "pattern": r"2024-09-26T12Z"},
            {"name": "source_name", "pattern": r"STOFS"},
        ],
        "sub_questions": 1,
    },
}


# ---------------------------------------------------------------------------
# Reference tables (values transcribed from the published evaluation)
# ---------------------------------------------------------------------------

TABLE1 = {
    "columns": ["single_nhc", "single_fema_noaa", "linear_nhc_noaa", "linear_nhc_nu", "parallel_2track", "complex_3track", "overall"],
    "labels": {
        "single_nhc": "Single NHC",
        "single_fema_noaa": "Single FEMA/NOAA",
        "linear_nhc_noaa": "Linear NHC->NOAA",
        "linear_nhc_nu": "Linear NHC->N+U",
        "parallel_2track": "Parallel 2-Track",
        "complex_3track": "Complex 3-Track",
        "overall": "Overall",
    },
    "n": {"single_nhc": 7, "single_fema_noaa": 5, "linear_nhc_noaa": 8, "linear_nhc_nu": 5, "parallel_2track": 7, "complex_3track": 5, "overall": 37},
    "metrics": {
        "factual_precision": {"single_nhc": 99.5, "single_fema_noaa": 95.0, "linear_nhc_noaa": 90.1, "linear_nhc_nu": 82.2, "parallel_2track": 94.9, "complex_3track": 95.9, "overall": 93.2},
        "topology_selection": {"single_nhc": 100.0, "single_fema_noaa": 100.0, "linear_nhc_noaa": 100.0, "linear_nhc_nu": 100.0, "parallel_2track": 100.0, "complex_3track": 100.0, "overall": 100.0},
        "agent_f1": {"single_nhc": 100.0, "single_fema_noaa": 100.0, "linear_nhc_noaa": 80.0, "linear_nhc_nu": 88.0, "parallel_2track": 95.1, "complex_3track": 97.1, "overall": 92.7},
        "source_attribution": {"single_nhc": 100.0, "single_fema_noaa": 100.0, "linear_nhc_noaa": 90.6, "linear_nhc_nu": 70.0, "parallel_2track": 78.6, "complex_3track": 90.0, "overall": 88.5},
    },
    "overall_score": {"single_nhc": 99.9, "single_fema_noaa": 98.8, "linear_nhc_noaa": 90.2, "linear_nhc_nu": 85.0, "parallel_2track": 92.2, "complex_3track": 95.8, "overall": 93.6},
    "avg_latency_s": {"single_nhc": 18, "single_fema_noaa": 25, "linear_nhc_noaa": 89, "linear_nhc_nu": 68, "parallel_2track": 73, "complex_3track": 93, "overall": 62},
    "pass_rate": "37/37",
    "errors": 0,
}

TABLE2 = {
    "baseline": {"factual_precision": 91.9, "topology_selection": 100.0, "agent_f1": 87.3, "source_attribution": 84.5, "latency_s": 75},
    "variants": {
        "fixed_graph": {"scores": {"factual_precision": 63.2, "topology_selection": 71.4, "agent_f1": 67.2, "source_attribution": 59.5, "latency_s": 85}, "delta": {"factual_precision": -28.7, "topology_selection": -28.6, "agent_f1": -20.1, "source_attribution": -25.0, "latency_s": 10}},
        "no_consolidation": {"scores": {"factual_precision": 87.3, "topology_selection": 100.0, "agent_f1": 87.3, "source_attribution": 93.5, "latency_s": 65}, "delta": {"factual_precision": -4.6, "topology_selection": 0.0, "agent_f1": 0.0, "source_attribution": 8.9, "latency_s": -10}},
        "no_reporter": {"scores": {"factual_precision": 81.1, "topology_selection": 100.0, "agent_f1": 87.3, "source_attribution": 88.1, "latency_s": 74}, "delta": {"factual_precision": -10.8, "topology_selection": 0.0, "agent_f1": 0.0, "source_attribution": 3.6, "latency_s": -1}},
    },
}

STRESS_REFERENCE = {
    "scaling": [
        {"sub_questions": 1, "n": 25, "accuracy": 92.7, "latency_s": 52},
        {"sub_questions": 2, "n": 7, "accuracy": 92.7, "latency_s": 73},
        {"sub_questions": 3, "n": 5, "accuracy": 94.7, "latency_s": 93},
        {"sub_questions": 4, "n": 1, "accuracy": 90.6, "latency_s": 137},
        {"sub_questions": 5, "n": 1, "accuracy": 95.0, "latency_s": 152},
    ],
    "paraphrase": {
        "rows": [
            {"group": "L01", "type": "Surge", "topology_agreement": True, "agent_agreement": False, "score_sigma": 2.7},
            {"group": "S02", "type": "Category", "topology_agreement": True, "agent_agreement": True, "score_sigma": 0.0},
            {"group": "O01", "type": "Flood zone", "topology_agreement": True, "agent_agreement": True, "score_sigma": 0.0},
            {"group": "P01", "type": "Parallel", "topology_agreement": True, "agent_agreement": False, "score_sigma": 2.0},
        ],
        "overall": {"topology_agreement": "4/4", "agent_agreement": "2/4", "mean_sigma": 1.2},
    },
    "adversarial": {
        "rows": [
            {"id": "ADV1", "type": "Wrong location", "issue_detected": True, "hallucination_free": True, "responsive": True},
            {"id": "ADV2", "type": "Inland location", "issue_detected": False, "hallucination_free": True, "responsive": False},
            {"id": "ADV3", "type": "Nonexistent storm", "issue_detected": True, "hallucination_free": True, "responsive": True},
            {"id": "ADV4", "type": "Wrong category", "issue_detected": True, "hallucination_free": True, "responsive": True},
            {"id": "ADV5", "type": "Inland FEMA", "issue_detected": True, "hallucination_free": True, "responsive": True},
        ],
        "overall": {"issue_detected": "4/5", "hallucination_free": "5/5", "responsive": "4/5"},
    },
    "fault": {
        "rows": [
            {"failed_source": "noaa_coops", "partial_answer": True, "notes_limitation": False, "no_crash": True},
            {"failed_source": "usgs", "partial_answer": True, "notes_limitation": True, "no_crash": True},
            {"failed_source": "fema", "partial_answer": True, "notes_limitation": True, "no_crash": True},
        ],
        "overall": {"partial_answer": "3/3", "notes_limitation": "2/3", "no_crash": "3/3"},
    },
}

SUBSET_COSTS = {
    "rows": [
        {"id": "S02", "category": "Single NHC", "tokens": 16546, "cost": 0.06, "time_s": 21},
        {"id": "O01", "category": "Single FEMA", "tokens": 14910, "cost": 0.06, "time_s": 43},
        {"id": "M01", "category": "Linear NHC->N+U", "tokens": 55997, "cost": 0.19, "time_s": 58},
        {"id": "L01", "category": "Linear NHC->NOAA", "tokens": 96959, "cost": 0.33, "time_s": 78},
        {"id": "L03", "category": "Linear NHC->NOAA", "tokens": 136460, "cost": 0.45, "time_s": 88},
        {"id": "P01", "category": "Parallel 2-Track", "tokens": 103097, "cost": 0.38, "time_s": 118},
        {"id": "C01", "category": "Complex 3-Track", "tokens": 103525, "cost": 0.38, "time_s": 119},
    ],
    "average": {"tokens": 75356, "cost": 0.27, "time_s": 75},
    "rates": {"input_per_million": 3.00, "output_per_million": 15.00},
}


def make_images(out_dir: Path) -> None:
    from PIL import Image, ImageDraw

    out_dir.mkdir(parents=True, exist_ok=True)
    contour = Image.new("RGB", (96, 96), (10, 40, 90))
    d = ImageDraw.Draw(contour)
    for i, color in enumerate([(30, 90, 160), (60, 140, 190), (240, 200, 80), (220, 90, 40)]):
        d.ellipse([10 + 8 * i, 20 + 6 * i, 86 - 8 * i, 90 - 6 * i], outline=color, width=2)
    contour.save(out_dir / "stofs_contour.png")

    basemap = Image.new("RGB", (96, 96), (235, 232, 222))
    d = ImageDraw.Draw(basemap)
    for x in range(0, 96, 16):
        d.line([(x, 0), (x, 96)], fill=(200, 200, 200))
        d.line([(0, x), (96, x)], fill=(200, 200, 200))
    d.line([(0, 70), (96, 40)], fill=(90, 130, 200), width=4)
    basemap.save(out_dir / "osm_basemap.png")


def dump(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def main() -> None:
    _check_budgets()
    scen = DATA / "scenarios"
    corp = DATA / "corpus"
    ref = DATA / "reference"
    fix = DATA / "fixtures"
    for d in (scen, corp, ref, fix):
        d.mkdir(parents=True, exist_ok=True)

    # benchmark corpus + scripts
    corpus_docs = []
    for qid in BENCHMARK_IDS:
        spec = SPECS[qid]
        usage = SUBSET_USAGE.get(qid, DEFAULT_USAGE)
        dump(scen / f"{qid}.json", build_scenario(qid, spec, usage))
        corpus_docs.append(entry_doc(qid, spec))
    dump(corp / "benchmark.json", corpus_docs)
    dump(corp / "ablation_subset.json", ABLATION_SUBSET)

    # ablation variant scripts for the representative subset
    for qid in ABLATION_SUBSET:
        spec = SPECS[qid]
        usage = SUBSET_USAGE.get(qid, DEFAULT_USAGE)
        dump(scen / f"{qid}.no_reporter.json", build_scenario(qid, spec, usage, overrides=NO_REPORTER_OVERRIDES.get(qid, {})))
        dump(scen / f"{qid}.no_consolidation.json", build_scenario(qid, spec, usage, overrides=NO_CONSOLIDATION_OVERRIDES.get(qid, {})))
        fg = fixed_graph_spec(qid)
        dump(scen / f"{qid}.fixed_graph.json", build_scenario(qid, fg, DEFAULT_USAGE, include_architect=False))

    # paraphrase corpus
    para_doc = []
    for group, variants in PARAPHRASES.items():
        group_entries = []
        for vid, vspec in variants:
            dump(scen / f"{vid}.json", build_scenario(vid, vspec, DEFAULT_USAGE))
            group_entries.append(entry_doc(vid, vspec, scenario_name=vid))
        para_doc.append({"group": group, "entries": group_entries})
    dump(corp / "paraphrase.json", para_doc)

    # adversarial corpus
    adv_doc = []
    for case in ADVERSARIAL:
        spec = {
            "category": "adversarial",
            "query": case["query"],
            "kind": "count",
            "truth": {"kind": "count", "value": 0, "source": "n/a"},
            "expected_agents": ["nhc"],
            "topology": case["topology"],
            "tracks": case["tracks"],
            "consolidators": case["consolidators"],
            "merge": case["merge"],
            "answer": case["answer"],
            "rubric": [],
            "sub_questions": 1,
        }
        dump(scen / f"{case['id']}.json", build_scenario(case["id"], spec, DEFAULT_USAGE))
        adv_doc.append({"type": case["type"], "entry": entry_doc(case["id"], spec), "rubric": case["judging"]})
    dump(corp / "adversarial.json", adv_doc)

    # fault corpus: baseline plus one script per failed source
    dump(scen / "F01.json", build_scenario("F01", FAULT_SPEC, DEFAULT_USAGE))
    for agent, final in FAULT_FINALS.items():
        overrides = {"consolidator:0": FAULT_CONSOLIDATORS[agent], "reporter": FAULT_ANSWERS[agent]}
        dump(
            scen / f"F01.fault_{agent}.json",
            build_scenario("F01", FAULT_SPEC, DEFAULT_USAGE, overrides=overrides, fault_agent=agent, fault_final=final),
        )
    dump(
        corp / "fault.json",
        {
            "entry": entry_doc("F01", FAULT_SPEC),
            "fault_agents": list(FAULT_FINALS),
            "limitation_pattern": r"(?i)unavailable|could not be retrieved|outage|missing",
        },
    )

    # scaling corpus
    for qid, spec in X_SPECS.items():
        dump(scen / f"{qid}.json", build_scenario(qid, spec, DEFAULT_USAGE))
    dump(
        corp / "scaling.json",
        {
            "levels": {"1": ["S02", "O01", "L01", "L03", "M01"], "2": ["P01"], "3": ["C01"], "4": ["X401"], "5": ["X501"]},
            "extra_entries": [entry_doc(qid, spec) for qid, spec in X_SPECS.items()],
        },
    )

    # demos
    demo_doc = []
    for qid, spec in DEMO_SPECS.items():
        dump(scen / f"{qid}.json", build_scenario(qid, spec, DEFAULT_USAGE))
        demo_doc.append(entry_doc(qid, spec))
    dump(corp / "demos.json", demo_doc)

    # fixtures (accumulated during scenario builds)
    make_images(fix / "images")
    dump(fix / "world.json", {"entries": sorted(FIXTURES.values(), key=lambda e: (e["tool"], json.dumps(e["args"], sort_keys=True)))})

    # reference tables
    dump(ref / "table1.json", TABLE1)
    dump(ref / "table2.json", TABLE2)
    dump(ref / "stress.json", STRESS_REFERENCE)
    dump(
        ref / "stage_tokens.json",
        {stage: {"input_tokens": i, "output_tokens": o} for stage, (i, o) in STAGE_TOKEN_TOTALS.items()},
    )
    dump(ref / "subset_costs.json", SUBSET_COSTS)

    n_scripts = len(list(scen.glob("*.json")))
    print(f"wrote {len(corpus_docs)} corpus entries, {n_scripts} scenario scripts, {len(FIXTURES)} fixtures")


if __name__ == "__main__":
    main()
