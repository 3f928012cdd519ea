import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { TriageStore } from "../src/state.js";
import {
  errorResponse,
  jsonResponse,
  queuePayload,
  readOnlyResponder,
  referral,
  reportPayload,
  stubFetch,
} from "./helpers.js";

function storeWith(stub: ReturnType<typeof stubFetch>, intervalMs = 5000) {
  return new TriageStore(new ApiClient("http://api.test", stub.fetchFn), intervalMs);
}

afterEach(() => {
  vi.useRealTimers();
});

describe("queue snapshot", () => {
  it("keeps the server's item order verbatim", async () => {
    const items = [referral("ref-9", 8.0), referral("ref-1", 4.0), referral("ref-5", 2.0)];
    const stub = stubFetch(readOnlyResponder(queuePayload(items), reportPayload()));
    const store = storeWith(stub);
    await store.refresh();
    expect(store.state.items.map((i) => i.referral_id)).toEqual([
      "ref-9",
      "ref-1",
      "ref-5",
    ]);
    expect(store.state.count).toBe(3);
    expect(store.state.connection).toBe("live");
  });

  it("exposes the /report payload values untouched", async () => {
    const report = reportPayload({ referral_rate: 0.01, referral_goal: 0.02, goal_met: true });
    const stub = stubFetch(readOnlyResponder(queuePayload([]), report));
    const store = storeWith(stub);
    await store.refresh();
    expect(store.state.report?.referral_rate).toBe(0.01);
    expect(store.state.report?.goal_met).toBe(true);
  });

  it("marks data stale on poll failure, keeps it, and recovers on the next success", async () => {
    const items = [referral("ref-1", 4.0)];
    let failing = false;
    const happy = readOnlyResponder(queuePayload(items), reportPayload());
    const stub = stubFetch((call) =>
      failing ? errorResponse(500, "internal", "boom") : happy(call),
    );
    const store = storeWith(stub);
    await store.refresh();
    expect(store.state.connection).toBe("live");

    failing = true;
    await store.refresh();
    expect(store.state.connection).toBe("stale");
    expect(store.state.items).toHaveLength(1); // stale data still shown

    failing = false;
    await store.refresh();
    expect(store.state.connection).toBe("live");
  });

  it("polls on the configured interval and keeps retrying after failures", async () => {
    vi.useFakeTimers();
    const stub = stubFetch(readOnlyResponder(queuePayload([]), reportPayload()));
    const store = storeWith(stub, 1000);
    store.start();
    await vi.advanceTimersByTimeAsync(0);
    const after_start = stub.calls.length;
    expect(after_start).toBe(2); // queue + report
    await vi.advanceTimersByTimeAsync(3000);
    expect(stub.calls.length).toBe(after_start + 3 * 2);
    store.stop();
    await vi.advanceTimersByTimeAsync(5000);
    expect(stub.calls.length).toBe(after_start + 3 * 2); // stopped means stopped
  });
});

describe("submitResolution", () => {
  it("removes the item locally on 200 without refetching the queue", async () => {
    const items = [referral("ref-9", 8.0), referral("ref-1", 4.0)];
    const happy = readOnlyResponder(queuePayload(items), reportPayload());
    const stub = stubFetch((call) => {
      if (call.method === "POST" && call.url.endsWith("/referrals/ref-9/resolution")) {
        return jsonResponse({ schema_version: "1", post_id: "post-ref-9", status: "Resolved" });
      }
      return happy(call);
    });
    const store = storeWith(stub);
    await store.refresh();
    const before = stub.calls.length;

    const ok = await store.submitResolution("ref-9", [0, 1, 0, 0, 1, 1], "answered");
    expect(ok).toBe(true);
    expect(store.state.items.map((i) => i.referral_id)).toEqual(["ref-1"]);
    expect(store.state.count).toBe(1);
    // Exactly one request during the mutation: the POST. No reload.
    const during = stub.calls.slice(before);
    expect(during).toHaveLength(1);
    expect(during[0]?.method).toBe("POST");
    expect(during[0]?.body).toEqual({ labels: [0, 1, 0, 0, 1, 1], response: "answered" });
  });

  it("rejects a second submission while one is in flight (single POST)", async () => {
    const items = [referral("ref-9", 8.0)];
    const happy = readOnlyResponder(queuePayload(items), reportPayload());
    let release: (r: Response) => void = () => {};
    const gate = new Promise<Response>((resolve) => (release = resolve));
    const stub = stubFetch((call) => {
      if (call.method === "POST") return undefined; // handled below
      return happy(call);
    });
    const fetchFn = stub.fetchFn;
    const gatedFetch: typeof fetchFn = (input, init) =>
      init?.method === "POST"
        ? (stub.calls.push({ method: "POST", url: input, body: JSON.parse(String(init.body)) }),
          gate)
        : fetchFn(input, init);
    const store = new TriageStore(new ApiClient("http://api.test", gatedFetch));
    await store.refresh();

    const first = store.submitResolution("ref-9", [0, 0, 0, 0, 0, 0], "first");
    const second = await store.submitResolution("ref-9", [1, 1, 1, 1, 1, 1], "second");
    expect(second).toBe(false); // refused while in flight
    release(jsonResponse({ status: "Resolved" }));
    expect(await first).toBe(true);
    expect(stub.calls.filter((c) => c.method === "POST")).toHaveLength(1);
  });

  it("pauses polling while a mutation is in flight", async () => {
    vi.useFakeTimers();
    const items = [referral("ref-9", 8.0)];
    const happy = readOnlyResponder(queuePayload(items), reportPayload());
    let release: (r: Response) => void = () => {};
    const gate = new Promise<Response>((resolve) => (release = resolve));
    const stub = stubFetch(happy);
    const gatedFetch: typeof stub.fetchFn = (input, init) =>
      init?.method === "POST" ? gate : stub.fetchFn(input, init);
    const store = new TriageStore(new ApiClient("http://api.test", gatedFetch), 1000);
    store.start();
    await vi.advanceTimersByTimeAsync(0);
    const before = stub.calls.length;

    const pending = store.submitResolution("ref-9", [0, 0, 0, 0, 0, 0], "slow reply");
    await vi.advanceTimersByTimeAsync(3500); // several ticks pass while POST hangs
    expect(stub.calls.length).toBe(before); // no polls fired

    release(jsonResponse({ status: "Resolved" }));
    expect(await pending).toBe(true);
    await vi.advanceTimersByTimeAsync(1000); // polling resumes
    expect(stub.calls.length).toBe(before + 2);
    store.stop();
  });

  it("on 409 sets the conflict banner and refreshes the queue", async () => {
    const stale = [referral("ref-9", 8.0), referral("ref-1", 4.0)];
    const fresh = [referral("ref-1", 4.0)];
    let current = stale;
    const stub = stubFetch((call) => {
      if (call.method === "POST") {
        return errorResponse(409, "conflict", "referral 'ref-9' is already resolved");
      }
      if (call.url.includes("/referrals")) return jsonResponse(queuePayload(current));
      if (call.url.includes("/report")) return jsonResponse(reportPayload());
      return undefined;
    });
    const store = storeWith(stub);
    await store.refresh();
    expect(store.state.items).toHaveLength(2);

    current = fresh; // another tutor resolved ref-9 meanwhile
    const ok = await store.submitResolution("ref-9", [0, 0, 0, 0, 0, 0], "too late");
    expect(ok).toBe(false);
    expect(store.state.conflict).toBe("referral 'ref-9' is already resolved");
    // The queue was refetched and now shows the other tutor's outcome.
    expect(store.state.items.map((i) => i.referral_id)).toEqual(["ref-1"]);
    const afterPost = stub.calls.findIndex((c) => c.method === "POST");
    const refetched = stub.calls
      .slice(afterPost + 1)
      .some((c) => c.method === "GET" && c.url.includes("/referrals"));
    expect(refetched).toBe(true);
  });

  it("refuses incomplete labels or an empty response without calling the API", async () => {
    const stub = stubFetch(readOnlyResponder(queuePayload([referral("ref-9", 8)]), reportPayload()));
    const store = storeWith(stub);
    await store.refresh();
    const before = stub.calls.length;
    expect(await store.submitResolution("ref-9", [0, 1], "text")).toBe(false);
    expect(store.state.error).toMatch(/six labels/);
    expect(await store.submitResolution("ref-9", [0, 1, 0, 0, 1, 1], "   ")).toBe(false);
    expect(store.state.error).toMatch(/response text/);
    expect(stub.calls.length).toBe(before); // nothing reached the network
  });
});
