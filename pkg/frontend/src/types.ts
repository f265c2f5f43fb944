// Wire types for the gateway API. These mirror the JSON the server emits;
// the console renders them and never re-derives business state client-side.

export type NodeKind = "specialist" | "consolidator" | "image" | "cross_track_merge" | "reporter";

export interface LegNodeDoc {
  node_id: string;
  kind: NodeKind;
  agent_id: string;
  track_index: number | null;
  layer_index: number;
}

export interface TrackDoc {
  goal: string;
  layers: string[][];
}

export interface PlanDoc {
  topology: "linear" | "parallel_tracks";
  tracks: TrackDoc[];
  rationale?: string;
}

export interface LegDoc {
  nodes: LegNodeDoc[];
  plan: PlanDoc;
}

export interface PlanResponse {
  plan: PlanDoc;
  leg: LegDoc;
  rewrite_log?: string[];
  revision?: number;
  static?: boolean;
}

export interface SessionDoc {
  session_id: string;
  state: "planning" | "awaiting_approval" | "executing" | "done" | "failed";
  query: string;
  variant: string;
  revision_count: number;
  error: string | null;
  plan?: PlanDoc;
  final_text?: string;
  trace_id?: string;
}

export interface EventDoc {
  session_id: string;
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
  at: number;
}

export interface TraceRecord {
  kind: "trace_open" | "tool_call" | "node";
  seq: number;
  node_id?: string;
  tool_name?: string;
  outcome?: string;
  result_preview?: string;
  result_content_hash?: string;
  harvested_urls?: string[];
  arguments_preview?: string;
  stage?: string;
  [key: string]: unknown;
}
