// Thin fetch wrappers over the gateway endpoints. No business logic here:
// errors surface as thrown ApiError with the server's detail string.

import type { EventDoc, PlanResponse, SessionDoc, TraceRecord } from "./types.js";
import { queryString, type TraceFilter } from "./trace.js";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const doc = (await resp.json()) as { detail?: string };
      detail = doc.detail ?? detail;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class GatewayClient {
  constructor(private base: string = "") {}

  submit(query: string, variant = "full"): Promise<SessionDoc> {
    return request(`${this.base}/sessions`, { method: "POST", body: JSON.stringify({ query, variant }) });
  }

  session(id: string): Promise<SessionDoc> {
    return request(`${this.base}/sessions/${id}`);
  }

  plan(id: string): Promise<PlanResponse> {
    return request(`${this.base}/sessions/${id}/plan`);
  }

  approve(id: string): Promise<SessionDoc> {
    return request(`${this.base}/sessions/${id}/approve`, { method: "POST" });
  }

  revise(id: string, feedback: string): Promise<SessionDoc> {
    return request(`${this.base}/sessions/${id}/revise`, { method: "POST", body: JSON.stringify({ feedback }) });
  }

  events(id: string, after = 0): Promise<EventDoc[]> {
    return request(`${this.base}/sessions/${id}/events?after=${after}`);
  }

  trace(id: string, filter: TraceFilter = {}): Promise<{ trace_id: string; records: TraceRecord[] }> {
    return request(`${this.base}/traces/${id}${queryString(filter)}`);
  }

  exportTrace(id: string): Promise<unknown> {
    return request(`${this.base}/traces/${id}/export`);
  }
}
