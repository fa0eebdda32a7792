/** Turn the current table plus a signed delta into a side-by-side diff.
 * Rows pair up by their first column (the key attribute); cell highlights
 * mark positions where a paired row changed. */

import type { DeltaRow } from "./types";

export type RowKind = "unchanged" | "removed" | "added" | "modified";

export interface DiffRow {
  key: string;
  before: string[] | null;
  after: string[] | null;
  kind: RowKind;
  changedCells: number[];
}

export function buildDiff(
  currentRows: string[][],
  delta: DeltaRow[],
  relation: string,
): DiffRow[] {
  const minus = new Map<string, string[]>();
  const plus = new Map<string, string[]>();
  for (const row of delta) {
    if (row.relation !== relation || row.values.length === 0) continue;
    const key = row.values[0]!;
    (row.sign === "-" ? minus : plus).set(key, row.values);
  }
  const out: DiffRow[] = [];
  const seen = new Set<string>();
  for (const values of currentRows) {
    const key = values[0] ?? "";
    seen.add(key);
    const removed = minus.get(key);
    const added = plus.get(key);
    if (!removed && !added) {
      out.push({ key, before: values, after: values, kind: "unchanged", changedCells: [] });
    } else if (removed && added) {
      out.push({
        key,
        before: removed,
        after: added,
        kind: "modified",
        changedCells: changedCells(removed, added),
      });
    } else if (removed) {
      out.push({ key, before: removed, after: null, kind: "removed", changedCells: [] });
    } else {
      out.push({ key, before: values, after: added!, kind: "modified",
                 changedCells: changedCells(values, added!) });
    }
  }
  // pure insertions: keys present only in the plus side
  for (const [key, values] of plus) {
    if (!seen.has(key) && !minus.has(key)) {
      out.push({ key, before: null, after: values, kind: "added", changedCells: [] });
    }
  }
  // rows removed from a key that no longer exists in the current table
  for (const [key, values] of minus) {
    if (!seen.has(key)) {
      const added = plus.get(key);
      if (added) {
        out.push({ key, before: values, after: added, kind: "modified",
                   changedCells: changedCells(values, added) });
      } else {
        out.push({ key, before: values, after: null, kind: "removed", changedCells: [] });
      }
    }
  }
  return out;
}

export function changedCells(before: string[], after: string[]): number[] {
  const out: number[] = [];
  const n = Math.max(before.length, after.length);
  for (let i = 0; i < n; i++) {
    if (before[i] !== after[i]) out.push(i);
  }
  return out;
}

export function isEmptyDelta(delta: DeltaRow[]): boolean {
  return delta.length === 0;
}
