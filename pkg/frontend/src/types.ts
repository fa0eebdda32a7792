/** Payload shapes of the what-if service API. */

export interface StatementEntry {
  pos: number;
  ast: Record<string, unknown>;
  sql: string;
}

export interface HistoryPayload {
  id: string;
  statements: StatementEntry[];
}

export type ModOp = "replace" | "insert" | "delete";

export interface Modification {
  op: ModOp;
  pos: number;
  statement?: Record<string, unknown>;
}

export type Method = "naive" | "r" | "r+ds" | "r+ps" | "r+ps+ds";

export const METHODS: Method[] = ["naive", "r", "r+ds", "r+ps", "r+ps+ds"];

export interface DeltaRow {
  relation: string;
  sign: "+" | "-";
  values: string[];
}

export interface SliceInfo {
  kept: number[];
  removed: number[];
  solver_calls: number;
  method: string;
}

export interface RunReport {
  method: string;
  phases_ms: Record<string, number>;
  slices: Record<string, SliceInfo>;
  ds_conditions: Record<string, unknown>;
  degraded: string[];
  solver_unknown: boolean;
}

export interface WhatIfResponse {
  request_id: string;
  delta: DeltaRow[];
  report: RunReport;
  detail?: string;
}

export interface RelationPage {
  relation: string;
  at: number;
  columns: string[];
  types: string[];
  total: number;
  rows: string[][];
}

export interface ParseResult {
  ok: boolean;
  error?: string;
  line?: number;
  column?: number;
  ast?: Record<string, unknown>;
  sql?: string;
}

export interface WhatIfRequestBody {
  history_id: string;
  modifications: Modification[];
  method: Method;
}
