/** Typed client for the what-if service; every displayed number comes from
 * these responses, the UI never recomputes deltas. */

import type {
  HistoryPayload,
  ParseResult,
  RelationPage,
  WhatIfRequestBody,
  WhatIfResponse,
} from "./types";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly doFetch: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.doFetch(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = (await res.json()) as T & { error?: string; detail?: string };
    // 422 carries a degraded-but-valid answer; surface it like a success
    if (!res.ok && res.status !== 422) {
      throw new ApiError(res.status, body.error ?? `HTTP ${res.status}`);
    }
    return body;
  }

  getHistory(id: string): Promise<HistoryPayload> {
    return this.request(`/api/history/${encodeURIComponent(id)}`);
  }

  parseStatement(text: string): Promise<ParseResult> {
    return this.request("/api/parse", {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  whatIf(body: WhatIfRequestBody): Promise<WhatIfResponse> {
    return this.request("/api/whatif", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getRelation(name: string, at?: number): Promise<RelationPage> {
    const suffix = at === undefined ? "" : `?at=${at}`;
    return this.request(`/api/relation/${encodeURIComponent(name)}${suffix}`);
  }
}
