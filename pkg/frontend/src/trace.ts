// Trace browser model: conjunctive filtering over ledger records, matching
// the gateway's /traces/{id} query semantics so counts line up either way.

import type { TraceRecord } from "./types.js";

export interface TraceFilter {
  node?: string;
  tool?: string;
  outcome?: string;
  kind?: string;
}

export function filterRecords(records: TraceRecord[], filter: TraceFilter): TraceRecord[] {
  return records.filter((r) => {
    if (filter.kind !== undefined && r.kind !== filter.kind) return false;
    if (filter.node !== undefined && r.node_id !== filter.node) return false;
    if (filter.tool !== undefined && r.tool_name !== filter.tool) return false;
    if (filter.outcome !== undefined && r.outcome !== filter.outcome) return false;
    return true;
  });
}

export interface TraceCounts {
  total: number;
  toolCalls: number;
  nodes: number;
  errors: number;
}

export function rowCounts(records: TraceRecord[]): TraceCounts {
  return {
    total: records.length,
    toolCalls: filterRecords(records, { kind: "tool_call" }).length,
    nodes: filterRecords(records, { kind: "node" }).length,
    errors: filterRecords(records, { kind: "tool_call", outcome: "error" }).length,
  };
}

export function queryString(filter: TraceFilter): string {
  const params = new URLSearchParams();
  if (filter.node) params.set("node", filter.node);
  if (filter.tool) params.set("tool", filter.tool);
  if (filter.outcome) params.set("outcome", filter.outcome);
  if (filter.kind) params.set("kind", filter.kind);
  const s = params.toString();
  return s ? `?${s}` : "";
}
