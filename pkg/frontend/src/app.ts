// Hash-routed single-page console: submit -> plan review (approve/revise with
// visual diff) -> live run -> report, plus a filterable trace browser.

import { GatewayClient, ApiError } from "./api.js";
import { buildGrid, diffLegs } from "./grid.js";
import { initialRunState, isComplete, reduce, type RunState } from "./runstate.js";
import { subscribeToSession, type Subscription } from "./sse.js";
import { filterRecords, rowCounts, type TraceFilter } from "./trace.js";
import type { LegDoc, TraceRecord } from "./types.js";
import { el, renderPlanGrid, renderRecordDetail, renderReport, renderTicker, renderTraceTable } from "./views.js";

const client = new GatewayClient("");
let activeStream: Subscription | null = null;

function root(): HTMLElement {
  return document.getElementById("app")!;
}

function setView(...children: HTMLElement[]): void {
  const app = root();
  app.replaceChildren(...children);
}

function toast(message: string): void {
  const note = el("div", "toast", message);
  document.body.appendChild(note);
  setTimeout(() => note.remove(), 4000);
}

// -- submit -----------------------------------------------------------------

function submitView(): void {
  const wrap = el("div", "view submit-view");
  wrap.appendChild(el("h1", undefined, "New run"));
  const form = el("form");
  const input = el("textarea") as unknown as HTMLTextAreaElement;
  input.rows = 3;
  input.placeholder = "Ask about storm surge, flood zones, storm counts...";
  const button = el("button", "primary", "Propose plan");
  form.append(input, button);
  form.addEventListener("submit", async (e) => {
    e.preventDefault();
    try {
      const session = await client.submit(input.value.trim());
      location.hash = `#/session/${session.session_id}`;
    } catch (err) {
      toast(err instanceof ApiError ? err.message : String(err));
    }
  });
  const traceLink = el("p");
  traceLink.appendChild(el("span", undefined, "Or inspect a past run: "));
  const anchor = el("a", undefined, "trace browser");
  anchor.setAttribute("href", "#/traces");
  traceLink.appendChild(anchor);
  wrap.append(form, traceLink);
  setView(wrap);
}

// -- plan review ------------------------------------------------------------

async function planView(sessionId: string): Promise<void> {
  const session = await client.session(sessionId);
  if (session.state === "executing" || session.state === "done" || session.state === "failed") {
    return liveView(sessionId);
  }
  const planDoc = await client.plan(sessionId);
  const wrap = el("div", "view plan-view");
  wrap.appendChild(el("h1", undefined, "Sign-off"));
  wrap.appendChild(el("p", "query", session.query));
  if (planDoc.rewrite_log?.length) {
    wrap.appendChild(el("p", "rewrites", `rewrites applied: ${planDoc.rewrite_log.join(", ")}`));
  }
  const gridHost = el("div");
  gridHost.appendChild(renderPlanGrid(buildGrid(planDoc.leg)));
  wrap.appendChild(gridHost);

  const controls = el("div", "controls");
  const approve = el("button", "primary", "Approve");
  const feedback = el("input") as unknown as HTMLInputElement;
  feedback.placeholder = "revision feedback";
  const revise = el("button", undefined, "Revise");
  controls.append(approve, feedback, revise);
  wrap.appendChild(controls);

  let before: LegDoc = planDoc.leg;
  approve.addEventListener("click", async () => {
    try {
      await client.approve(sessionId);
      liveView(sessionId);
    } catch (err) {
      approve.setAttribute("disabled", "disabled");
      toast(err instanceof ApiError ? err.message : String(err));
    }
  });
  revise.addEventListener("click", async () => {
    try {
      await client.revise(sessionId, feedback.value);
      const revised = await client.plan(sessionId);
      gridHost.replaceChildren(renderPlanGrid(buildGrid(revised.leg), undefined, diffLegs(before, revised.leg)));
      before = revised.leg;
      toast(`revision ${revised.revision ?? ""} proposed`);
    } catch (err) {
      toast(err instanceof ApiError ? err.message : String(err));
    }
  });
  setView(wrap);
}

// -- live run ------------------------------------------------------------------

async function liveView(sessionId: string): Promise<void> {
  const session = await client.session(sessionId);
  const planDoc = await client.plan(sessionId);
  let state: RunState = initialRunState(planDoc.leg);
  const grid = buildGrid(planDoc.leg);

  const wrap = el("div", "view live-view");
  wrap.appendChild(el("h1", undefined, "Run"));
  wrap.appendChild(el("p", "query", session.query));
  const stateBadge = el("span", `state-badge state-${session.state}`, session.state);
  wrap.appendChild(stateBadge);
  const gridHost = el("div");
  const tickerHost = el("div");
  const reportHost = el("div");
  wrap.append(gridHost, tickerHost, reportHost);
  setView(wrap);

  const redraw = () => {
    gridHost.replaceChildren(renderPlanGrid(grid, state));
    tickerHost.replaceChildren(renderTicker(state));
    if (state.finalText !== null) {
      const done = el("div");
      done.appendChild(el("h2", undefined, "Report"));
      done.appendChild(renderReport(state.finalText));
      const s = client.session(sessionId);
      s.then((doc) => {
        if (doc.trace_id) {
          const link = el("a", "trace-link", "provenance trace");
          link.setAttribute("href", `#/trace/${doc.trace_id}`);
          done.appendChild(link);
        }
        stateBadge.textContent = doc.state;
        stateBadge.className = `state-badge state-${doc.state}`;
      });
      reportHost.replaceChildren(done);
    }
    if (state.failed) {
      reportHost.replaceChildren(el("div", "error", state.error ?? "run failed"));
      stateBadge.textContent = "failed";
    }
  };

  // catch up from seq 0, then stream the tail; reconnects resume from lastSeq
  const past = await client.events(sessionId);
  for (const event of past) state = reduce(state, event);
  redraw();
  if (!isComplete(state)) {
    activeStream?.close();
    activeStream = subscribeToSession(
      "",
      sessionId,
      (event) => {
        state = reduce(state, event);
        redraw();
      },
      (url) => new EventSource(url) as unknown as import("./sse.js").EventSourceLike,
    );
  }
}

// -- trace browser -----------------------------------------------------------------

async function traceView(traceId: string): Promise<void> {
  const wrap = el("div", "view trace-view");
  wrap.appendChild(el("h1", undefined, `Trace ${traceId.slice(0, 8)}`));
  const filters = el("div", "filters");
  const nodeInput = el("input") as unknown as HTMLInputElement;
  nodeInput.placeholder = "node";
  const toolInput = el("input") as unknown as HTMLInputElement;
  toolInput.placeholder = "tool";
  const outcomeInput = el("input") as unknown as HTMLInputElement;
  outcomeInput.placeholder = "outcome";
  const apply = el("button", undefined, "Filter");
  const exportBtn = el("button", undefined, "Export");
  const counts = el("span", "counts");
  filters.append(nodeInput, toolInput, outcomeInput, apply, exportBtn, counts);
  const tableHost = el("div");
  const detailHost = el("div", "drawer");
  wrap.append(filters, tableHost, detailHost);
  setView(wrap);

  let all: TraceRecord[] = [];
  try {
    const doc = await client.trace(traceId);
    all = doc.records;
  } catch (err) {
    setView(el("div", "error", `trace not found: ${traceId}`));
    return;
  }

  const draw = () => {
    const filter: TraceFilter = {};
    if (nodeInput.value) filter.node = nodeInput.value;
    if (toolInput.value) filter.tool = toolInput.value;
    if (outcomeInput.value) filter.outcome = outcomeInput.value;
    const rows = filterRecords(all, filter);
    const c = rowCounts(rows);
    counts.textContent = `${c.total} rows (${c.toolCalls} tool calls, ${c.nodes} nodes, ${c.errors} errors)`;
    if (rows.length === 0) {
      tableHost.replaceChildren(el("p", "empty", "no records match"));
    } else {
      tableHost.replaceChildren(
        renderTraceTable(rows, (r) => detailHost.replaceChildren(renderRecordDetail(r))),
      );
    }
  };
  apply.addEventListener("click", draw);
  exportBtn.addEventListener("click", async () => {
    const doc = await client.exportTrace(traceId);
    const blob = new Blob([JSON.stringify(doc, null, 1)], { type: "application/json" });
    const a = el("a") as unknown as HTMLAnchorElement;
    a.href = URL.createObjectURL(blob);
    a.download = `${traceId}.json`;
    a.click();
  });
  draw();
}

async function tracesListView(): Promise<void> {
  const resp = await fetch("/traces");
  const doc = (await resp.json()) as { trace_ids: string[] };
  const wrap = el("div", "view");
  wrap.appendChild(el("h1", undefined, "Traces"));
  const list = el("ul");
  for (const id of doc.trace_ids) {
    const item = el("li");
    const a = el("a", undefined, id);
    a.setAttribute("href", `#/trace/${id}`);
    item.appendChild(a);
    list.appendChild(item);
  }
  if (!doc.trace_ids.length) wrap.appendChild(el("p", "empty", "no traces recorded yet"));
  wrap.appendChild(list);
  setView(wrap);
}

// -- router ---------------------------------------------------------------------------

function route(): void {
  activeStream?.close();
  activeStream = null;
  const hash = location.hash || "#/";
  const sessionMatch = hash.match(/^#\/session\/(.+)$/);
  const traceMatch = hash.match(/^#\/trace\/(.+)$/);
  if (sessionMatch) {
    planView(sessionMatch[1]).catch((err) => setView(el("div", "error", String(err))));
  } else if (traceMatch) {
    traceView(traceMatch[1]).catch((err) => setView(el("div", "error", String(err))));
  } else if (hash === "#/traces") {
    tracesListView().catch((err) => setView(el("div", "error", String(err))));
  } else {
    submitView();
  }
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
