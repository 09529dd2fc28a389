/** Bootstrap: wire the client, state, renderer, keyboard, and queue polling. */

import { Client } from "./api.js";
import { App } from "./state.js";
import { bindKeyboard, renderApp } from "./view.js";

export const POLL_INTERVAL_MS = 2500;

export function boot(root: HTMLElement, apiBase: string): App {
  const client = new Client(apiBase);
  const app = new App(client, (state) => renderApp(root, app, state));
  bindKeyboard(app);
  app.startPolling(POLL_INTERVAL_MS);
  renderApp(root, app, app.state);
  return app;
}

declare global {
  interface Window {
    mqsynthApp?: App;
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root instanceof HTMLElement) {
    // ?api=... overrides the base URL when the UI is served off-origin
    const params = new URLSearchParams(window.location.search);
    const base = params.get("api") ?? window.location.origin;
    window.mqsynthApp = boot(root, base);
  }
}
