// Plan grid model: tracks as columns, compiled layers as rows, plus the
// run-level tail (cross-track merge, reporter). Rendering is a fixed grid,
// so the view is isomorphic to the leg serialization by construction.

import type { LegDoc, LegNodeDoc, NodeKind } from "./types.js";

export interface Chip {
  nodeId: string;
  kind: NodeKind;
  agentId: string;
}

export interface TrackColumn {
  trackIndex: number;
  goal: string;
  rows: Chip[][]; // one row per compiled layer, ascending
}

export interface PlanGrid {
  columns: TrackColumn[];
  tail: Chip[]; // cross-track merge (if any), then reporter
}

function chip(node: LegNodeDoc): Chip {
  return { nodeId: node.node_id, kind: node.kind, agentId: node.agent_id };
}

export function buildGrid(leg: LegDoc): PlanGrid {
  const columns: TrackColumn[] = leg.plan.tracks.map((t, i) => ({
    trackIndex: i,
    goal: t.goal,
    rows: [],
  }));
  const byLayer = new Map<number, Map<number, Chip[]>>();
  for (const node of leg.nodes) {
    if (node.track_index === null) continue;
    let layers = byLayer.get(node.track_index);
    if (!layers) {
      layers = new Map();
      byLayer.set(node.track_index, layers);
    }
    const row = layers.get(node.layer_index) ?? [];
    row.push(chip(node));
    layers.set(node.layer_index, row);
  }
  for (const [trackIndex, layers] of byLayer) {
    const column = columns[trackIndex];
    if (!column) continue;
    for (const layerIndex of [...layers.keys()].sort((a, b) => a - b)) {
      column.rows.push(layers.get(layerIndex)!);
    }
  }
  const tail = leg.nodes.filter((n) => n.track_index === null).map(chip);
  return { columns, tail };
}

export function gridNodeIds(grid: PlanGrid): string[] {
  const ids: string[] = [];
  for (const column of grid.columns) {
    for (const row of column.rows) {
      for (const c of row) ids.push(c.nodeId);
    }
  }
  for (const c of grid.tail) ids.push(c.nodeId);
  return ids;
}

/** Round-trip check: the rendered grid must carry exactly the leg's node ids. */
export function isIsomorphic(grid: PlanGrid, leg: LegDoc): boolean {
  const a = [...gridNodeIds(grid)].sort();
  const b = leg.nodes.map((n) => n.node_id).sort();
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

export interface PlanDiff {
  added: string[];
  removed: string[];
}

/** Node-id diff between two proposed graphs, for the revise view. */
export function diffLegs(before: LegDoc, after: LegDoc): PlanDiff {
  const old = new Set(before.nodes.map((n) => n.node_id));
  const now = new Set(after.nodes.map((n) => n.node_id));
  return {
    added: [...now].filter((id) => !old.has(id)).sort(),
    removed: [...old].filter((id) => !now.has(id)).sort(),
  };
}
