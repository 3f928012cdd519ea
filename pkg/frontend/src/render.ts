/** DOM rendering for the triage console. No framework, no client math:
 * every figure shown is a formatted API payload value.
 */

import { DIMENSIONS, DimensionName, ReferralView, ReportPayload } from "./api.js";
import { TriageState, TriageStore } from "./state.js";

/** Probabilities render with exactly three decimals, straight from the payload. */
export function formatProb(value: number): string {
  return value.toFixed(3);
}

export function formatPercent(value: number): string {
  return `${(value * 100).toFixed(2)}%`;
}

/** Binary toggle prompts shown next to each dimension. */
export const LABEL_PROMPTS: Record<DimensionName, string> = {
  opinion: "Expresses an opinion?",
  question: "Asks a question?",
  answer: "Provides an answer?",
  sentiment: "Positive sentiment?",
  confusion: "Shows confusion?",
  urgency: "Needs urgent attention?",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderGauge(report: ReportPayload | null): HTMLElement {
  const gauge = el("div", "rate-gauge");
  if (report === null) {
    gauge.append(el("span", "rate-value", "–"));
    return gauge;
  }
  gauge.append(
    el("span", "rate-value", formatPercent(report.referral_rate)),
    el("span", "rate-goal", `goal ${formatPercent(report.referral_goal)}`),
    el(
      "span",
      report.goal_met ? "rate-status goal-met" : "rate-status goal-missed",
      report.goal_met ? "goal met" : "over goal",
    ),
  );
  return gauge;
}

function renderProbabilities(item: ReferralView): HTMLElement {
  const row = el("ul", "dimensions");
  if (item.verdict === null) {
    row.append(el("li", "dimension unscored", "no scores available"));
    return row;
  }
  for (const dim of DIMENSIONS) {
    const verdict = item.verdict.per_dimension[dim];
    const isGating = item.gating_dimension === dim;
    const cell = el("li", isGating ? "dimension gating" : "dimension");
    cell.dataset.dimension = dim;
    cell.append(
      el("span", "dimension-name", dim),
      el("span", "dimension-prob", formatProb(verdict.probs[1])),
    );
    if (isGating) cell.title = "lowest-confidence dimension";
    row.append(cell);
  }
  return row;
}

export type SubmitHandler = (
  referralId: string,
  labels: number[],
  responseText: string,
) => void;

function renderForm(
  item: ReferralView,
  mutationInFlight: boolean,
  onSubmit: SubmitHandler,
): HTMLElement {
  const form = el("form", "resolution-form");
  const chosen = new Map<DimensionName, number>();

  const toggles = el("div", "label-toggles");
  for (const dim of DIMENSIONS) {
    const group = el("fieldset", "label-toggle");
    group.dataset.dimension = dim;
    group.append(el("legend", "label-prompt", LABEL_PROMPTS[dim]));
    for (const value of [1, 0]) {
      const option = el("label", "toggle-option");
      const input = el("input") as HTMLInputElement;
      input.type = "radio";
      input.name = `${item.referral_id}:${dim}`;
      input.value = String(value);
      input.addEventListener("change", () => {
        chosen.set(dim, value);
        sync();
      });
      option.append(input, document.createTextNode(value === 1 ? "yes" : "no"));
      group.append(option);
    }
    toggles.append(group);
  }

  const response = el("textarea", "response-text") as HTMLTextAreaElement;
  response.placeholder = "Reply to the learner…";
  response.addEventListener("input", () => sync());

  const submit = el("button", "submit-resolution", "Send resolution") as HTMLButtonElement;
  submit.type = "submit";

  const ready = (): boolean =>
    chosen.size === DIMENSIONS.length && response.value.trim() !== "";

  const sync = (): void => {
    submit.disabled = mutationInFlight || !ready();
  };
  sync();

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (submit.disabled || !ready()) return;
    submit.disabled = true; // a double click must not fire twice
    onSubmit(
      item.referral_id,
      DIMENSIONS.map((dim) => chosen.get(dim) ?? 0),
      response.value,
    );
  });

  form.append(toggles, response, submit);
  return form;
}

export function renderItem(
  item: ReferralView,
  mutationInFlight: boolean,
  onSubmit: SubmitHandler,
): HTMLElement {
  const card = el("article", "referral");
  card.dataset.referralId = item.referral_id;
  const head = el("header", "referral-head");
  head.append(
    el("span", "referral-id", item.referral_id),
    el("span", "referral-priority", `priority ${formatProb(item.priority)}`),
    el("span", "referral-reason", item.reason ?? ""),
  );
  card.append(
    head,
    el("p", "post-text", item.text ?? `(post ${item.post_id})`),
    renderProbabilities(item),
    renderForm(item, mutationInFlight, onSubmit),
  );
  return card;
}

export function renderQueue(
  items: ReferralView[],
  mutationInFlight: boolean,
  onSubmit: SubmitHandler,
): HTMLElement {
  const queue = el("section", "queue");
  if (items.length === 0) {
    queue.append(el("p", "queue-empty", "No open referrals — all caught up."));
    return queue;
  }
  // Server order is the triage order; render it verbatim.
  for (const item of items) {
    queue.append(renderItem(item, mutationInFlight, onSubmit));
  }
  return queue;
}

function renderBanners(state: TriageState): HTMLElement {
  const banners = el("div", "banners");
  if (state.connection === "stale") {
    banners.append(
      el("p", "banner stale", "Connection lost — showing last known queue, retrying…"),
    );
  }
  if (state.conflict !== null) {
    banners.append(el("p", "banner conflict", `Conflict: ${state.conflict}`));
  }
  if (state.error !== null) {
    banners.append(el("p", "banner error", state.error));
  }
  return banners;
}

/** Mount the console into `root`; returns an unsubscribe function. */
export function renderApp(root: HTMLElement, store: TriageStore): () => void {
  const render = (state: TriageState): void => {
    root.textContent = "";
    const header = el("header", "console-head");
    header.append(
      el("h1", "console-title", "Tutor triage console"),
      el("span", "queue-count", `${state.count} open`),
      renderGauge(state.report),
      el("span", `connection ${state.connection}`, state.connection),
    );
    root.append(
      header,
      renderBanners(state),
      renderQueue(state.items, state.mutationInFlight, (id, labels, text) => {
        void store.submitResolution(id, labels, text);
      }),
    );
  };
  return store.subscribe(render);
}
