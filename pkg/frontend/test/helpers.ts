/** Test doubles: scripted fetch stub + payload fixtures shaped exactly
 * like the curation service's responses.
 */

import {
  DIMENSIONS,
  DimensionName,
  FetchLike,
  QueuePayload,
  ReferralView,
  ReportPayload,
  VerdictView,
} from "../src/api.js";

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

export type Responder = (call: RecordedCall) => Response | undefined;

export interface FetchStub {
  fetchFn: FetchLike;
  calls: RecordedCall[];
  /** Replace the active responder (e.g. switch from 409 to fresh queue). */
  use(responder: Responder): void;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function errorResponse(
  status: number,
  code: string,
  message: string,
): Response {
  return jsonResponse(
    { schema_version: "1", error: { code, message, detail: {} } },
    status,
  );
}

export function stubFetch(responder: Responder): FetchStub {
  const calls: RecordedCall[] = [];
  let active = responder;
  const fetchFn: FetchLike = async (input, init) => {
    const call: RecordedCall = {
      method: init?.method ?? "GET",
      url: input,
      body: init?.body ? JSON.parse(String(init.body)) : null,
    };
    calls.push(call);
    const response = active(call);
    if (response === undefined) {
      throw new TypeError(`unexpected request: ${call.method} ${call.url}`);
    }
    return response;
  };
  return { fetchFn, calls, use: (r) => (active = r) };
}

export function verdict(
  probsYes: Partial<Record<DimensionName, number>> = {},
): VerdictView {
  const per: Record<string, { probs: [number, number]; label: number; margin: number }> =
    {};
  const labels: Record<string, number> = {};
  for (const dim of DIMENSIONS) {
    const p = probsYes[dim] ?? 0.25;
    per[dim] = {
      probs: [1 - p, p],
      label: p > 0.5 ? 1 : 0,
      margin: Math.abs(1 - 2 * p),
    };
    labels[dim] = per[dim].label;
  }
  return {
    labels: labels as VerdictView["labels"],
    confidence: 0.75,
    per_dimension: per as VerdictView["per_dimension"],
  };
}

export function referral(
  id: string,
  priority: number,
  overrides: Partial<ReferralView> = {},
): ReferralView {
  return {
    referral_id: id,
    post_id: `post-${id}`,
    text: `forum message for ${id}`,
    priority,
    created_at: 1000,
    reason: "low-confidence",
    verdict: verdict(),
    gating_dimension: "opinion",
    open: true,
    resolution: null,
    ...overrides,
  };
}

export function queuePayload(items: ReferralView[]): QueuePayload {
  return { schema_version: "1", items, count: items.length };
}

export function reportPayload(
  overrides: Partial<ReportPayload> = {},
): ReportPayload {
  return {
    schema_version: "1",
    processed: 100,
    status_counts: { New: 0, Responded: 97, Referred: 3, Resolved: 0 },
    referred_ever: 3,
    referral_rate: 0.03,
    flagged_posts: 10,
    flagged_referral_rate: 0.3,
    referral_goal: 0.02,
    goal_met: false,
    fallback_responses: 0,
    throughput: { posts: 100, elapsed_s: 50, posts_per_s: 2 },
    ...overrides,
  };
}

/** Routes GET /referrals and GET /report to fixed payloads. */
export function readOnlyResponder(
  queue: QueuePayload,
  report: ReportPayload,
): Responder {
  return (call) => {
    if (call.method === "GET" && call.url.includes("/referrals")) {
      return jsonResponse(queue);
    }
    if (call.method === "GET" && call.url.includes("/report")) {
      return jsonResponse(report);
    }
    return undefined;
  };
}
