import { describe, expect, it } from "vitest";

import { subscribeToSession, type EventSourceLike } from "../src/sse.js";
import type { EventDoc } from "../src/types.js";

type Handler = (e: { data: string; lastEventId: string; type: string }) => void;

class FakeSource implements EventSourceLike {
  handlers = new Map<string, Handler[]>();
  onerror: ((e: unknown) => void) | null = null;
  closed = false;

  constructor(public url: string) {}

  addEventListener(type: string, handler: Handler): void {
    const list = this.handlers.get(type) ?? [];
    list.push(handler);
    this.handlers.set(type, list);
  }

  close(): void {
    this.closed = true;
  }

  emit(kind: string, seq: number, payload: Record<string, unknown>): void {
    for (const handler of this.handlers.get(kind) ?? []) {
      handler({ data: JSON.stringify(payload), lastEventId: String(seq), type: kind });
    }
  }

  fail(): void {
    this.onerror?.(new Error("drop"));
  }
}

describe("sse subscription", () => {
  it("delivers stream events in order", () => {
    const sources: FakeSource[] = [];
    const seen: EventDoc[] = [];
    subscribeToSession("", "s1", (e) => seen.push(e), (url) => {
      const s = new FakeSource(url);
      sources.push(s);
      return s;
    });
    sources[0].emit("node_started", 1, { node_id: "a" });
    sources[0].emit("node_finished", 2, { node_id: "a" });
    expect(seen.map((e) => [e.kind, e.seq])).toEqual([
      ["node_started", 1],
      ["node_finished", 2],
    ]);
  });

  it("resumes after a drop from the last seen seq", () => {
    const sources: FakeSource[] = [];
    const seen: EventDoc[] = [];
    subscribeToSession("", "s1", (e) => seen.push(e), (url) => {
      const s = new FakeSource(url);
      sources.push(s);
      return s;
    });
    expect(sources[0].url).toContain("after=0");
    sources[0].emit("node_started", 1, { node_id: "a" });
    sources[0].emit("node_finished", 2, { node_id: "a" });
    sources[0].fail();
    expect(sources.length).toBe(2);
    expect(sources[0].closed).toBe(true);
    expect(sources[1].url).toContain("after=2");
    // server replays an overlap; the wrapper suppresses the duplicate
    sources[1].emit("node_finished", 2, { node_id: "a" });
    sources[1].emit("reported", 3, { final_text: "done" });
    expect(seen.map((e) => e.seq)).toEqual([1, 2, 3]);
  });

  it("close() stops reconnects", () => {
    const sources: FakeSource[] = [];
    const sub = subscribeToSession("", "s1", () => {}, (url) => {
      const s = new FakeSource(url);
      sources.push(s);
      return s;
    });
    sub.close();
    sources[0].fail();
    expect(sources.length).toBe(1);
    expect(sources[0].closed).toBe(true);
  });
});
