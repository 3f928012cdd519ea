/** Bootstrap: wire the API client, store, and renderer to the page.
 *
 * The API base URL comes from, in priority order:
 *   1. a  `?api=…` query parameter,
 *   2. a  `window.FORUMFUSE_API` global set by the embedding page,
 *   3. same-origin (the service can serve this page directly).
 * An optional bearer token rides in `?token=…` or `window.FORUMFUSE_TOKEN`.
 */

import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";
import { DEFAULT_POLL_INTERVAL_MS, TriageStore } from "./state.js";

declare global {
  interface Window {
    FORUMFUSE_API?: string;
    FORUMFUSE_TOKEN?: string;
    FORUMFUSE_POLL_MS?: number;
  }
}

export function resolveConfig(): {
  apiBase: string;
  token: string | undefined;
  pollMs: number;
} {
  const params = new URLSearchParams(window.location.search);
  const apiBase =
    params.get("api") ?? window.FORUMFUSE_API ?? window.location.origin;
  const token = params.get("token") ?? window.FORUMFUSE_TOKEN ?? undefined;
  const pollParam = params.get("poll_ms");
  const pollMs =
    (pollParam !== null ? Number(pollParam) : window.FORUMFUSE_POLL_MS) ||
    DEFAULT_POLL_INTERVAL_MS;
  return { apiBase: apiBase.replace(/\/$/, ""), token, pollMs };
}

export function boot(root: HTMLElement): TriageStore {
  const { apiBase, token, pollMs } = resolveConfig();
  const api = new ApiClient(apiBase, undefined, token);
  const store = new TriageStore(api, pollMs);
  renderApp(root, store);
  store.start();
  return store;
}

const mount = document.getElementById("app");
if (mount !== null) {
  boot(mount);
}
