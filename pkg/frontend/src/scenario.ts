/** Scenario draft state: the working modification list, chosen method, and
 * a session-local cache of prior runs keyed by the canonical request JSON.
 * Draft edits never mutate the server-side history; each run snapshot
 * records the exact request that produced it. */

import type {
  Method,
  Modification,
  WhatIfRequestBody,
  WhatIfResponse,
} from "./types";

export interface RunSnapshot {
  request: WhatIfRequestBody;
  response: WhatIfResponse;
}

/** Stable serialization: object keys sorted so logically equal requests
 * cache-hit regardless of construction order. */
export function canonicalRequestKey(body: WhatIfRequestBody): string {
  const sortKeys = (value: unknown): unknown => {
    if (Array.isArray(value)) return value.map(sortKeys);
    if (value !== null && typeof value === "object") {
      const out: Record<string, unknown> = {};
      for (const k of Object.keys(value as object).sort()) {
        out[k] = sortKeys((value as Record<string, unknown>)[k]);
      }
      return out;
    }
    return value;
  };
  return JSON.stringify(sortKeys(body));
}

export class ScenarioDraft {
  method: Method = "r+ps+ds";
  private mods: Modification[] = [];
  private cache = new Map<string, RunSnapshot>();
  private inFlight: string | null = null;
  private seq = 0;

  constructor(readonly historyId: string) {}

  get modifications(): readonly Modification[] {
    return this.mods;
  }

  replaceStatement(pos: number, statement: Record<string, unknown>): void {
    this.mods.push({ op: "replace", pos, statement });
  }

  insertStatement(pos: number, statement: Record<string, unknown>): void {
    this.mods.push({ op: "insert", pos, statement });
  }

  deleteStatement(pos: number): void {
    this.mods.push({ op: "delete", pos });
  }

  removeModification(index: number): void {
    this.mods.splice(index, 1);
  }

  clearModifications(): void {
    this.mods = [];
  }

  requestBody(): WhatIfRequestBody {
    return {
      history_id: this.historyId,
      modifications: [...this.mods],
      method: this.method,
    };
  }

  cachedRun(body: WhatIfRequestBody): RunSnapshot | undefined {
    return this.cache.get(canonicalRequestKey(body));
  }

  /** Run the draft; cache hits return without touching the network, and a
   * response that is no longer the latest in-flight request is discarded. */
  async run(
    send: (body: WhatIfRequestBody) => Promise<WhatIfResponse>,
  ): Promise<RunSnapshot | null> {
    const body = this.requestBody();
    const key = canonicalRequestKey(body);
    const hit = this.cache.get(key);
    if (hit) return hit;
    const ticket = `${++this.seq}`;
    this.inFlight = ticket;
    const response = await send(body);
    if (this.inFlight !== ticket) return null; // stale: a newer run started
    this.inFlight = null;
    const snapshot: RunSnapshot = { request: body, response };
    this.cache.set(key, snapshot);
    return snapshot;
  }

  exportJson(): string {
    return JSON.stringify(
      {
        history_id: this.historyId,
        method: this.method,
        modifications: this.mods,
        runs: [...this.cache.values()],
      },
      null,
      2,
    );
  }

  static importJson(text: string): ScenarioDraft {
    const raw = JSON.parse(text) as {
      history_id: string;
      method: Method;
      modifications: Modification[];
      runs?: RunSnapshot[];
    };
    const draft = new ScenarioDraft(raw.history_id);
    draft.method = raw.method;
    draft.mods = raw.modifications ?? [];
    for (const run of raw.runs ?? []) {
      draft.cache.set(canonicalRequestKey(run.request), run);
    }
    return draft;
  }
}
