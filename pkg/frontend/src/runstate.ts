// Live-run view state: a pure reducer over the session event stream.
// Events are sequenced by the server; the reducer ignores anything at or
// below the last applied seq, so replays and reconnect overlaps are no-ops.

import type { EventDoc, LegDoc } from "./types.js";

export type ChipStatus = "pending" | "running" | "done";

export interface ChipState {
  status: ChipStatus;
  hadError: boolean; // a tool call failed or was denied on this node
}

export interface ToolTick {
  seq: number;
  nodeId: string;
  tool: string;
  outcome: string;
}

export interface RunState {
  lastSeq: number;
  chips: Record<string, ChipState>;
  ticker: ToolTick[];
  finalText: string | null;
  failed: boolean;
  error: string | null;
  approved: boolean;
}

export function initialRunState(leg: LegDoc): RunState {
  const chips: Record<string, ChipState> = {};
  for (const node of leg.nodes) {
    chips[node.node_id] = { status: "pending", hadError: false };
  }
  return { lastSeq: 0, chips, ticker: [], finalText: null, failed: false, error: null, approved: false };
}

export function reduce(state: RunState, event: EventDoc): RunState {
  if (event.seq <= state.lastSeq) return state;
  const next: RunState = {
    ...state,
    lastSeq: event.seq,
    chips: { ...state.chips },
    ticker: state.ticker,
  };
  const nodeId = event.payload["node_id"] as string | undefined;
  switch (event.kind) {
    case "approved":
      next.approved = true;
      break;
    case "node_started":
      if (nodeId) next.chips[nodeId] = { ...(next.chips[nodeId] ?? { hadError: false }), status: "running", hadError: next.chips[nodeId]?.hadError ?? false };
      break;
    case "node_finished":
      if (nodeId) next.chips[nodeId] = { status: "done", hadError: next.chips[nodeId]?.hadError ?? false };
      break;
    case "consolidated":
    case "merged":
      if (nodeId && next.chips[nodeId] && next.chips[nodeId].status === "pending") {
        // fusion nodes emit their summary event even when the executor folds
        // them without a separate started/finished pair (identity pass-through)
        next.chips[nodeId] = { ...next.chips[nodeId], status: "done" };
      }
      break;
    case "tool_call": {
      const tick: ToolTick = {
        seq: event.seq,
        nodeId: nodeId ?? "",
        tool: (event.payload["tool"] as string) ?? "",
        outcome: (event.payload["outcome"] as string) ?? "",
      };
      next.ticker = [...state.ticker, tick];
      if (nodeId && tick.outcome !== "ok") {
        const chip = next.chips[nodeId] ?? { status: "running", hadError: false };
        next.chips[nodeId] = { ...chip, hadError: true };
      }
      break;
    }
    case "reported":
      next.finalText = (event.payload["final_text"] as string) ?? "";
      break;
    case "failed":
      next.failed = true;
      next.error = (event.payload["error"] as string) ?? "";
      break;
    default:
      break;
  }
  return next;
}

export function reduceAll(state: RunState, events: EventDoc[]): RunState {
  let current = state;
  for (const event of events) current = reduce(current, event);
  return current;
}

export function isComplete(state: RunState): boolean {
  return state.finalText !== null || state.failed;
}
