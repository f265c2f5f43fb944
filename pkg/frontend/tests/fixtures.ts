// The P01 session's compiled graph, captured verbatim from the gateway's
// /sessions/{id}/plan response (two tracks: Ike surge, Miami Beach zones).

import type { LegDoc } from "../src/types.js";

export const P01_LEG: LegDoc = {
  nodes: [
    { node_id: "t0.l0.nhc", kind: "specialist", agent_id: "nhc", track_index: 0, layer_index: 0 },
    { node_id: "t0.l1.noaa_coops", kind: "specialist", agent_id: "noaa_coops", track_index: 0, layer_index: 1 },
    { node_id: "t0.l1.usgs", kind: "specialist", agent_id: "usgs", track_index: 0, layer_index: 1 },
    { node_id: "t0.l2.consolidator", kind: "consolidator", agent_id: "consolidator", track_index: 0, layer_index: 2 },
    { node_id: "t1.l0.fema", kind: "specialist", agent_id: "fema", track_index: 1, layer_index: 0 },
    { node_id: "merge.cross_track_merge", kind: "cross_track_merge", agent_id: "cross_track_merge", track_index: null, layer_index: 3 },
    { node_id: "report.reporter", kind: "reporter", agent_id: "reporter", track_index: null, layer_index: 4 },
  ],
  plan: {
    topology: "parallel_tracks",
    tracks: [
      {
        goal: "Observed storm surge at Galveston during Hurricane Ike in 2008",
        layers: [["nhc"], ["noaa_coops", "usgs"]],
      },
      { goal: "FEMA flood zones for Miami Beach", layers: [["fema"]] },
    ],
    rationale: "scripted",
  },
};

let seq = 0;

export function resetSeq(): void {
  seq = 0;
}

export function ev(kind: string, payload: Record<string, unknown> = {}) {
  seq += 1;
  return { session_id: "s1", seq, kind, payload, at: 0 };
}

/** Event stream shaped like a real P01 run: layer barriers respected. */
export function p01EventStream() {
  resetSeq();
  return [
    ev("plan_proposed", { plan: P01_LEG.plan }),
    ev("approved", {}),
    ev("node_started", { node_id: "t0.l0.nhc", kind: "specialist" }),
    ev("tool_call", { node_id: "t0.l0.nhc", tool: "nhc_search_storms", outcome: "ok" }),
    ev("tool_call", { node_id: "t0.l0.nhc", tool: "nhc_get_best_track", outcome: "ok" }),
    ev("node_finished", { node_id: "t0.l0.nhc", kind: "specialist" }),
    ev("node_started", { node_id: "t0.l1.noaa_coops", kind: "specialist" }),
    ev("tool_call", { node_id: "t0.l1.noaa_coops", tool: "noaa_compute_surge", outcome: "ok" }),
    ev("node_finished", { node_id: "t0.l1.noaa_coops", kind: "specialist" }),
    ev("node_started", { node_id: "t0.l1.usgs", kind: "specialist" }),
    ev("tool_call", { node_id: "t0.l1.usgs", tool: "usgs_stn_get_hwms", outcome: "ok" }),
    ev("node_finished", { node_id: "t0.l1.usgs", kind: "specialist" }),
    ev("node_started", { node_id: "t0.l2.consolidator", kind: "consolidator" }),
    ev("consolidated", { node_id: "t0.l2.consolidator", sources: ["t0.l1.noaa_coops", "t0.l1.usgs"] }),
    ev("node_finished", { node_id: "t0.l2.consolidator", kind: "consolidator" }),
    ev("node_started", { node_id: "t1.l0.fema", kind: "specialist" }),
    ev("tool_call", { node_id: "t1.l0.fema", tool: "fema_nfhl_identify", outcome: "ok" }),
    ev("node_finished", { node_id: "t1.l0.fema", kind: "specialist" }),
    ev("node_started", { node_id: "merge.cross_track_merge", kind: "cross_track_merge" }),
    ev("merged", { node_id: "merge.cross_track_merge" }),
    ev("node_finished", { node_id: "merge.cross_track_merge", kind: "cross_track_merge" }),
    ev("node_started", { node_id: "report.reporter", kind: "reporter" }),
    ev("node_finished", { node_id: "report.reporter", kind: "reporter" }),
    ev("reported", { final_text: "1. Surge 2.44 m ...\n2. Zone AE and Zone VE ...", trace_id: "trace-1" }),
  ];
}
