import { describe, expect, it } from "vitest";

import { ScenarioDraft, canonicalRequestKey } from "../src/scenario";
import type { WhatIfRequestBody, WhatIfResponse } from "../src/types";

const FAKE_RESPONSE: WhatIfResponse = {
  request_id: "abc",
  delta: [],
  report: {
    method: "r+ps+ds",
    phases_ms: {},
    slices: {},
    ds_conditions: {},
    degraded: [],
    solver_unknown: false,
  },
};

describe("canonicalRequestKey", () => {
  it("is insensitive to key order", () => {
    const a = {
      history_id: "log",
      modifications: [{ op: "delete", pos: 2 }],
      method: "r",
    } as WhatIfRequestBody;
    const b = JSON.parse(
      '{"method":"r","modifications":[{"pos":2,"op":"delete"}],"history_id":"log"}',
    ) as WhatIfRequestBody;
    expect(canonicalRequestKey(a)).toBe(canonicalRequestKey(b));
  });

  it("distinguishes different modification lists", () => {
    const base = new ScenarioDraft("log");
    const key1 = canonicalRequestKey(base.requestBody());
    base.deleteStatement(1);
    expect(canonicalRequestKey(base.requestBody())).not.toBe(key1);
  });
});

describe("ScenarioDraft", () => {
  it("starts with an empty modification list", () => {
    const draft = new ScenarioDraft("log");
    expect(draft.modifications).toEqual([]);
    expect(draft.requestBody()).toEqual({
      history_id: "log",
      modifications: [],
      method: "r+ps+ds",
    });
  });

  it("collects replace/insert/delete edits in order", () => {
    const draft = new ScenarioDraft("log");
    draft.replaceStatement(1, { kind: "noop", relation: "R" });
    draft.insertStatement(2, { kind: "noop", relation: "R" });
    draft.deleteStatement(3);
    expect(draft.modifications.map((m) => m.op)).toEqual([
      "replace",
      "insert",
      "delete",
    ]);
    draft.removeModification(1);
    expect(draft.modifications.map((m) => m.op)).toEqual(["replace", "delete"]);
  });

  it("caches runs by canonical request and replays them without the network", async () => {
    const draft = new ScenarioDraft("log");
    let calls = 0;
    const send = async () => {
      calls += 1;
      return FAKE_RESPONSE;
    };
    const first = await draft.run(send);
    const second = await draft.run(send);
    expect(calls).toBe(1);
    expect(second).toBe(first);
  });

  it("re-runs when the method changes", async () => {
    const draft = new ScenarioDraft("log");
    let calls = 0;
    const send = async () => {
      calls += 1;
      return FAKE_RESPONSE;
    };
    await draft.run(send);
    draft.method = "naive";
    await draft.run(send);
    expect(calls).toBe(2);
  });

  it("discards stale responses by request ticket", async () => {
    const draft = new ScenarioDraft("log");
    let release: (() => void) | null = null;
    const slow = new Promise<void>((resolve) => {
      release = resolve;
    });
    const firstRun = draft.run(async () => {
      await slow;
      return FAKE_RESPONSE;
    });
    draft.method = "r";
    const secondRun = draft.run(async () => FAKE_RESPONSE);
    release!();
    const [first, second] = await Promise.all([firstRun, secondRun]);
    expect(first).toBeNull(); // superseded
    expect(second?.response).toBe(FAKE_RESPONSE);
  });

  it("survives export/import round trips including the cache", async () => {
    const draft = new ScenarioDraft("log");
    draft.deleteStatement(2);
    await draft.run(async () => FAKE_RESPONSE);
    const restored = ScenarioDraft.importJson(draft.exportJson());
    expect(restored.modifications).toEqual(draft.modifications);
    let calls = 0;
    const hit = await restored.run(async () => {
      calls += 1;
      return FAKE_RESPONSE;
    });
    expect(calls).toBe(0);
    expect(hit?.response.request_id).toBe("abc");
  });
});
