/** HTML renderers.  Pure string builders so the views are testable without
 * a browser; app.ts injects the results into the document. */

import type { DiffRow } from "./diff";
import type {
  HistoryPayload,
  Modification,
  RunReport,
  StatementEntry,
} from "./types";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderHistoryTable(history: HistoryPayload): string {
  const rows = history.statements
    .map(
      (s: StatementEntry) => `
    <tr data-pos="${s.pos}">
      <td class="pos">${s.pos}</td>
      <td class="sql"><code>${esc(s.sql)}</code></td>
      <td class="actions">
        <button data-action="replace" data-pos="${s.pos}">replace</button>
        <button data-action="insert" data-pos="${s.pos}">insert before</button>
        <button data-action="delete" data-pos="${s.pos}">delete</button>
      </td>
    </tr>`,
    )
    .join("");
  return `<table class="history"><thead>
    <tr><th>#</th><th>statement</th><th></th></tr>
  </thead><tbody>${rows}</tbody></table>`;
}

export function renderModificationList(mods: readonly Modification[]): string {
  if (mods.length === 0) {
    return `<p class="empty">No modifications: the hypothetical history equals the real one.</p>`;
  }
  const items = mods
    .map((m, i) => {
      const what =
        m.op === "delete"
          ? `delete statement ${m.pos}`
          : `${m.op} at ${m.pos}`;
      return `<li>${esc(what)} <button data-action="drop-mod" data-index="${i}">x</button></li>`;
    })
    .join("");
  return `<ol class="mods">${items}</ol>`;
}

export function renderDiffTable(
  columns: string[],
  rows: DiffRow[],
): string {
  const header = columns.map((c) => `<th>${esc(c)}</th>`).join("");
  const side = (row: DiffRow, which: "before" | "after"): string => {
    const values = which === "before" ? row.before : row.after;
    if (values === null) {
      return `<td class="missing" colspan="${columns.length}"></td>`;
    }
    return values
      .map((v, i) => {
        // mirror the paper's figure: highlight the new value only
        const hot =
          which === "after" &&
          row.kind === "modified" &&
          row.changedCells.includes(i);
        return `<td class="${hot ? "changed" : ""}">${esc(v)}</td>`;
      })
      .join("");
  };
  const body = rows
    .map(
      (row) => `
    <tr class="${row.kind}">
      ${side(row, "before")}
      <td class="gap"></td>
      ${side(row, "after")}
    </tr>`,
    )
    .join("");
  return `<table class="diff">
    <thead><tr>${header}<th class="gap"></th>${header}</tr>
    <tr><th colspan="${columns.length}">current</th><th class="gap"></th>
        <th colspan="${columns.length}">hypothetical</th></tr></thead>
    <tbody>${body}</tbody></table>`;
}

export function renderEmptyDelta(): string {
  return `<p class="no-effect">No effect: the modified history produces the same state.</p>`;
}

export function renderReport(report: RunReport): string {
  const phases = Object.entries(report.phases_ms)
    .map(([k, v]) => `<li>${esc(k)}: ${v.toFixed(1)} ms</li>`)
    .join("");
  const slices = Object.entries(report.slices)
    .map(
      ([rel, s]) =>
        `<li>${esc(rel)}: kept [${s.kept.join(", ")}], removed [${s.removed.join(", ")}]` +
        ` (${s.solver_calls} solver calls, ${esc(s.method)})</li>`,
    )
    .join("");
  return `<div class="report">
    <h3>run report (${esc(report.method)})</h3>
    <ul class="phases">${phases}</ul>
    ${slices ? `<h4>program slice</h4><ul class="slices">${slices}</ul>` : ""}
  </div>`;
}

export function renderDegradedBanner(detail: string): string {
  return `<div class="banner degraded">optimization degraded: ${esc(detail)}</div>`;
}
