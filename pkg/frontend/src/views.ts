// DOM rendering. Everything here is presentation: the grid/runstate/trace
// modules own the logic and are what the test suite exercises.

import { buildGrid, diffLegs, type PlanGrid } from "./grid.js";
import type { RunState } from "./runstate.js";
import type { LegDoc, TraceRecord } from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Minimal markdown: headings, bold, numbered/bulleted lines, paragraphs. */
export function renderMarkdown(text: string): HTMLElement {
  const root = el("div", "markdown");
  for (const block of text.split(/\n{2,}/)) {
    const lines = block.split("\n");
    for (const line of lines) {
      let node: HTMLElement;
      const heading = line.match(/^(#{1,4})\s+(.*)$/);
      if (heading) {
        node = el(("h" + Math.min(heading[1].length + 1, 6)) as "h2", undefined, heading[2]);
      } else if (/^\s*([-*]|\d+\.)\s+/.test(line)) {
        node = el("li", undefined, line.replace(/^\s*([-*]|\d+\.)\s+/, ""));
      } else {
        node = el("p", undefined, line);
      }
      root.appendChild(node);
    }
  }
  return root;
}

export function renderReport(text: string): HTMLElement {
  const wrap = el("div", "report");
  const toggle = el("button", "toggle", "raw");
  const pretty = renderMarkdown(text);
  const raw = el("pre", "raw hidden", text);
  toggle.addEventListener("click", () => {
    pretty.classList.toggle("hidden");
    raw.classList.toggle("hidden");
    toggle.textContent = raw.classList.contains("hidden") ? "raw" : "rendered";
  });
  wrap.append(toggle, pretty, raw);
  return wrap;
}

const KIND_BADGE: Record<string, string> = {
  specialist: "S",
  consolidator: "C",
  image: "I",
  cross_track_merge: "X",
  reporter: "R",
};

export function renderPlanGrid(grid: PlanGrid, runState?: RunState, diff?: { added: string[]; removed: string[] }): HTMLElement {
  const addset = new Set(diff?.added ?? []);
  const wrap = el("div", "plan-grid");
  for (const column of grid.columns) {
    const col = el("div", "track-column");
    col.dataset.track = String(column.trackIndex);
    col.appendChild(el("div", "track-goal", column.goal || `track ${column.trackIndex}`));
    for (const row of column.rows) {
      const rowEl = el("div", "layer-row");
      for (const chip of row) {
        rowEl.appendChild(renderChip(chip.nodeId, chip.kind, chip.agentId, runState, addset.has(chip.nodeId)));
      }
      col.appendChild(rowEl);
    }
    wrap.appendChild(col);
  }
  const tail = el("div", "tail-row");
  for (const chip of grid.tail) {
    tail.appendChild(renderChip(chip.nodeId, chip.kind, chip.agentId, runState, addset.has(chip.nodeId)));
  }
  wrap.appendChild(tail);
  if (diff && diff.removed.length) {
    const removed = el("div", "diff-removed", `removed: ${diff.removed.join(", ")}`);
    wrap.appendChild(removed);
  }
  return wrap;
}

function renderChip(nodeId: string, kind: string, agentId: string, runState?: RunState, added = false): HTMLElement {
  const chip = el("span", `chip kind-${kind}`);
  chip.dataset.nodeId = nodeId;
  const state = runState?.chips[nodeId];
  if (state) {
    chip.classList.add(`status-${state.status}`);
    if (state.hadError) chip.classList.add("had-error");
  }
  if (added) chip.classList.add("diff-added");
  chip.appendChild(el("b", "badge", KIND_BADGE[kind] ?? "?"));
  chip.appendChild(el("span", "agent", agentId));
  return chip;
}

export function renderDiffView(before: LegDoc, after: LegDoc): HTMLElement {
  return renderPlanGrid(buildGrid(after), undefined, diffLegs(before, after));
}

export function renderTicker(runState: RunState): HTMLElement {
  const list = el("ul", "ticker");
  for (const tick of runState.ticker.slice(-25)) {
    list.appendChild(el("li", `tick outcome-${tick.outcome}`, `${tick.nodeId} ${tick.tool} -> ${tick.outcome}`));
  }
  return list;
}

export function renderTraceTable(records: TraceRecord[], onSelect?: (r: TraceRecord) => void): HTMLElement {
  const table = el("table", "trace-table");
  const head = el("tr");
  for (const h of ["seq", "kind", "node", "tool", "outcome", "preview"]) {
    head.appendChild(el("th", undefined, h));
  }
  table.appendChild(head);
  for (const r of records) {
    const row = el("tr", `record kind-${r.kind}`);
    row.appendChild(el("td", undefined, String(r.seq)));
    row.appendChild(el("td", undefined, r.kind));
    row.appendChild(el("td", undefined, r.node_id ?? ""));
    row.appendChild(el("td", undefined, r.tool_name ?? ""));
    row.appendChild(el("td", undefined, r.outcome ?? ""));
    row.appendChild(el("td", "preview", (r.result_preview ?? "").slice(0, 80)));
    if (onSelect) row.addEventListener("click", () => onSelect(r));
    table.appendChild(row);
  }
  return table;
}

export function renderRecordDetail(record: TraceRecord): HTMLElement {
  const wrap = el("div", "record-detail");
  wrap.appendChild(el("h3", undefined, `${record.kind} ${record.node_id ?? ""}`));
  const fields: [string, string][] = [
    ["tool", record.tool_name ?? ""],
    ["outcome", record.outcome ?? ""],
    ["arguments", record.arguments_preview ?? ""],
    ["hash", record.result_content_hash ?? ""],
    ["urls", (record.harvested_urls ?? []).join(" ")],
  ];
  for (const [label, value] of fields) {
    if (!value) continue;
    const row = el("div", "field");
    row.appendChild(el("b", undefined, label + ": "));
    row.appendChild(el("span", undefined, value));
    wrap.appendChild(row);
  }
  if (record.result_preview) {
    wrap.appendChild(el("pre", "preview-full", record.result_preview));
  }
  return wrap;
}
