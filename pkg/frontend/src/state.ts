/** Polling store for the triage console.
 *
 * One snapshot of server truth plus banner/connection flags. Rules:
 *   - items keep the server's order; the client never re-sorts;
 *   - at most one mutation is in flight, and polling pauses while it is;
 *   - a successful resolution removes the item locally (no full reload);
 *   - a conflict (409) surfaces a banner and forces a queue refresh;
 *   - poll failures mark the data stale but keep showing it, and the
 *     poller keeps retrying.
 */

import { ApiClient, ApiError, ReferralView, ReportPayload } from "./api.js";

export type Connection = "connecting" | "live" | "stale";

export interface TriageState {
  items: ReferralView[];
  count: number;
  report: ReportPayload | null;
  connection: Connection;
  conflict: string | null;
  error: string | null;
  mutationInFlight: boolean;
}

export type Listener = (state: TriageState) => void;

export const DEFAULT_POLL_INTERVAL_MS = 5000;

export class TriageStore {
  readonly state: TriageState = {
    items: [],
    count: 0,
    report: null,
    connection: "connecting",
    conflict: null,
    error: null,
    mutationInFlight: false,
  };

  private listeners = new Set<Listener>();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly intervalMs: number = DEFAULT_POLL_INTERVAL_MS,
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    listener(this.state);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  /** Fetch queue + report; on failure keep stale data and stay retrying. */
  async refresh(): Promise<void> {
    try {
      const [queue, report] = await Promise.all([
        this.api.queue("open"),
        this.api.report(),
      ]);
      this.state.items = queue.items;
      this.state.count = queue.count;
      this.state.report = report;
      this.state.connection = "live";
    } catch {
      this.state.connection = "stale";
    }
    this.notify();
  }

  start(): void {
    if (this.timer !== null) return;
    void this.refresh();
    this.timer = setInterval(() => {
      if (this.state.mutationInFlight) return; // polling paused during mutation
      void this.refresh();
    }, this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /**
   * Post a tutor resolution. Returns true when the referral left the
   * queue (success), false when the submission was rejected locally or
   * by the server. Only one call runs at a time.
   */
  async submitResolution(
    referralId: string,
    labels: number[],
    responseText: string,
  ): Promise<boolean> {
    if (this.state.mutationInFlight) return false;
    if (labels.length !== 6 || labels.some((v) => v !== 0 && v !== 1)) {
      this.state.error = "all six labels must be set before submitting";
      this.notify();
      return false;
    }
    if (responseText.trim() === "") {
      this.state.error = "the response text must not be empty";
      this.notify();
      return false;
    }
    this.state.mutationInFlight = true;
    this.state.error = null;
    this.state.conflict = null;
    this.notify();
    try {
      await this.api.resolve(referralId, labels, responseText);
      // Success: drop the item locally; the next poll will confirm.
      this.state.items = this.state.items.filter(
        (item) => item.referral_id !== referralId,
      );
      this.state.count = this.state.items.length;
      this.state.mutationInFlight = false;
      this.notify();
      return true;
    } catch (err) {
      this.state.mutationInFlight = false;
      if (err instanceof ApiError && err.status === 409) {
        this.state.conflict = err.message;
        this.notify();
        await this.refresh(); // someone else changed it; show current truth
      } else {
        this.state.error =
          err instanceof Error ? err.message : "resolution failed";
        this.notify();
      }
      return false;
    }
  }
}
