/** Workbench wiring: load the history, let the analyst compose
 * modifications, run a method, and inspect the delta and slice report. */

import { ApiClient } from "./api";
import { buildDiff, isEmptyDelta } from "./diff";
import {
  esc,
  renderDegradedBanner,
  renderDiffTable,
  renderEmptyDelta,
  renderHistoryTable,
  renderModificationList,
  renderReport,
} from "./render";
import { ScenarioDraft } from "./scenario";
import { METHODS, type Method, type WhatIfResponse } from "./types";

const SERVICE_URL =
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8010";
const HISTORY_ID = new URLSearchParams(location.search).get("history") ?? "log";

const api = new ApiClient(SERVICE_URL);
let draft = new ScenarioDraft(HISTORY_ID);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function promptStatement(label: string): Promise<Record<string, unknown> | null> {
  const text = window.prompt(`${label} (statement DSL)`);
  if (!text) return null;
  const parsed = await api.parseStatement(text);
  if (!parsed.ok || !parsed.ast) {
    window.alert(`parse error: ${parsed.error ?? "invalid"}`);
    return null;
  }
  return parsed.ast;
}

async function refreshHistory(): Promise<void> {
  const history = await api.getHistory(HISTORY_ID);
  el("history").innerHTML = renderHistoryTable(history);
  el("history").querySelectorAll("button").forEach((button) => {
    button.addEventListener("click", () => {
      void onHistoryAction(
        button.dataset.action ?? "",
        Number(button.dataset.pos ?? "0"),
      );
    });
  });
}

async function onHistoryAction(action: string, pos: number): Promise<void> {
  if (action === "replace") {
    const ast = await promptStatement(`replace statement ${pos}`);
    if (ast) draft.replaceStatement(pos, ast);
  } else if (action === "insert") {
    const ast = await promptStatement(`insert before ${pos}`);
    if (ast) draft.insertStatement(pos, ast);
  } else if (action === "delete") {
    draft.deleteStatement(pos);
  }
  renderMods();
}

function renderMods(): void {
  el("mods").innerHTML = renderModificationList(draft.modifications);
  el("mods").querySelectorAll("button").forEach((button) => {
    button.addEventListener("click", () => {
      draft.removeModification(Number(button.dataset.index ?? "-1"));
      renderMods();
    });
  });
}

async function runDraft(): Promise<void> {
  el("banner").innerHTML = "";
  el("status").textContent = "running...";
  const snapshot = await draft.run((body) => api.whatIf(body));
  if (snapshot === null) return; // a newer request superseded this one
  el("status").textContent = "";
  await renderResult(snapshot.response);
}

async function renderResult(response: WhatIfResponse): Promise<void> {
  if (response.detail) {
    el("banner").innerHTML = renderDegradedBanner(response.detail);
  }
  if (isEmptyDelta(response.delta)) {
    el("delta").innerHTML = renderEmptyDelta();
  } else {
    const relations = [...new Set(response.delta.map((r) => r.relation))];
    const parts: string[] = [];
    for (const relation of relations) {
      const page = await api.getRelation(relation);
      const rows = buildDiff(page.rows, response.delta, relation);
      parts.push(`<h3>${esc(relation)}</h3>`);
      parts.push(renderDiffTable(page.columns, rows));
    }
    el("delta").innerHTML = parts.join("\n");
  }
  el("report").innerHTML = renderReport(response.report);
}

function wireControls(): void {
  const select = el("method") as HTMLSelectElement;
  select.innerHTML = METHODS.map(
    (m) => `<option value="${m}" ${m === draft.method ? "selected" : ""}>${m}</option>`,
  ).join("");
  select.addEventListener("change", () => {
    draft.method = select.value as Method;
  });
  el("run").addEventListener("click", () => void runDraft());
  el("clear").addEventListener("click", () => {
    draft.clearModifications();
    renderMods();
  });
  el("export").addEventListener("click", () => {
    const blob = new Blob([draft.exportJson()], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "scenario.json";
    a.click();
  });
  (el("import") as HTMLInputElement).addEventListener("change", async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (!file) return;
    draft = ScenarioDraft.importJson(await file.text());
    renderMods();
  });
}

export async function start(): Promise<void> {
  wireControls();
  renderMods();
  await refreshHistory();
}

if (typeof document !== "undefined" && document.getElementById("history")) {
  void start();
}
