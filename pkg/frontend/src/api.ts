/** Typed client for the curation service HTTP API.
 *
 * The console is a pure API consumer: every number it shows originates
 * in a payload from these endpoints, never from client-side math.
 */

export const DIMENSIONS = [
  "opinion",
  "question",
  "answer",
  "sentiment",
  "confusion",
  "urgency",
] as const;

export type DimensionName = (typeof DIMENSIONS)[number];

export interface DimensionVerdictView {
  probs: [number, number];
  label: number;
  margin: number;
}

export interface VerdictView {
  labels: Record<DimensionName, number>;
  confidence: number;
  per_dimension: Record<DimensionName, DimensionVerdictView>;
}

export interface ResolutionView {
  labels: number[];
  response: string;
  resolved_at: number;
}

export interface ReferralView {
  referral_id: string;
  post_id: string;
  text: string | null;
  priority: number;
  created_at: number;
  reason: string | null;
  verdict: VerdictView | null;
  gating_dimension: DimensionName | null;
  open: boolean;
  resolution: ResolutionView | null;
}

export interface QueuePayload {
  schema_version: string;
  items: ReferralView[];
  count: number;
}

export interface ReportPayload {
  schema_version: string;
  processed: number;
  status_counts: Record<string, number>;
  referred_ever: number;
  referral_rate: number;
  flagged_posts: number;
  flagged_referral_rate: number;
  referral_goal: number;
  goal_met: boolean;
  fallback_responses: number;
  throughput: { posts: number; elapsed_s: number; posts_per_s: number };
}

interface ErrorEnvelope {
  schema_version: string;
  error: { code: string; message: string; detail: unknown };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

async function toApiError(response: Response): Promise<ApiError> {
  let code = "unknown";
  let message = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as ErrorEnvelope;
    if (body && body.error) {
      code = body.error.code;
      message = body.error.message;
    }
  } catch {
    // Non-JSON error body; keep the generic message.
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly token?: string,
  ) {}

  private headers(json: boolean): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["content-type"] = "application/json";
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      headers: this.headers(false),
    });
    if (!response.ok) throw await toApiError(response);
    return (await response.json()) as T;
  }

  queue(status: "open" | "resolved" | "all" = "open"): Promise<QueuePayload> {
    return this.get<QueuePayload>(`/referrals?status=${status}`);
  }

  report(): Promise<ReportPayload> {
    return this.get<ReportPayload>("/report");
  }

  async resolve(
    referralId: string,
    labels: number[],
    responseText: string,
  ): Promise<void> {
    const response = await this.fetchFn(
      `${this.baseUrl}/referrals/${encodeURIComponent(referralId)}/resolution`,
      {
        method: "POST",
        headers: this.headers(true),
        body: JSON.stringify({ labels, response: responseText }),
      },
    );
    if (!response.ok) throw await toApiError(response);
    await response.json();
  }
}
