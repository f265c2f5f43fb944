// SSE subscription with resume. The browser's EventSource already replays
// Last-Event-ID on its automatic reconnects; this wrapper additionally
// survives a hard drop by reopening from the last seen seq, and is
// constructor-injected so tests can drive it with a fake source.

import type { EventDoc } from "./types.js";

export interface EventSourceLike {
  addEventListener(type: string, handler: (e: { data: string; lastEventId: string; type: string }) => void): void;
  close(): void;
  onerror: ((e: unknown) => void) | null;
}

export type SourceFactory = (url: string) => EventSourceLike;

export interface Subscription {
  close(): void;
}

export const EVENT_KINDS = [
  "plan_proposed",
  "approved",
  "node_started",
  "tool_call",
  "node_finished",
  "consolidated",
  "merged",
  "reported",
  "failed",
] as const;

export function subscribeToSession(
  base: string,
  sessionId: string,
  onEvent: (event: EventDoc) => void,
  factory: SourceFactory,
  maxReconnects = 10,
): Subscription {
  let lastSeq = 0;
  let closed = false;
  let reconnects = 0;
  let source: EventSourceLike | null = null;

  const open = () => {
    if (closed) return;
    const url = `${base}/sessions/${sessionId}/events?stream=true&after=${lastSeq}`;
    source = factory(url);
    const handler = (e: { data: string; lastEventId: string; type: string }) => {
      const seq = parseInt(e.lastEventId, 10);
      if (Number.isFinite(seq) && seq <= lastSeq) return; // replay overlap
      if (Number.isFinite(seq)) lastSeq = seq;
      const payload = JSON.parse(e.data) as Record<string, unknown>;
      onEvent({ session_id: sessionId, seq, kind: e.type, payload, at: 0 });
    };
    for (const kind of EVENT_KINDS) {
      source.addEventListener(kind, handler);
    }
    source.onerror = () => {
      source?.close();
      if (!closed && reconnects < maxReconnects) {
        reconnects += 1;
        open();
      }
    };
  };

  open();
  return {
    close() {
      closed = true;
      source?.close();
    },
  };
}
