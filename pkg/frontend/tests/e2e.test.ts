/** Scripted end-to-end labeling loop against the real Python service:
 *  create a session from the 10-row sample CSV, label two full batches of
 *  five through the rendered DOM, and check that the status line reports
 *  model v2 and the chart points equal GET /metrics verbatim. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

const HERE = dirname(fileURLToPath(import.meta.url));

import { boot } from "../src/main.js";
import type { App } from "../src/state.js";

const PORT = 8891 + Math.floor(Math.random() * 100);
const BASE = `http://127.0.0.1:${PORT}`;
let server: ChildProcess;

async function waitFor<T>(
  probe: () => T | Promise<T>,
  ok: (v: T) => boolean,
  what: string,
  timeoutMs = 60_000,
): Promise<T> {
  const start = Date.now();
  for (;;) {
    try {
      const value = await probe();
      if (ok(value)) return value;
    } catch {
      // keep polling
    }
    if (Date.now() - start > timeoutMs) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 120));
  }
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "mqsynth.cli", "serve", "--port", String(PORT), "--data-dir",
     mkdtempSync(join(tmpdir(), "mqsynth-e2e-"))],
    { cwd: join(HERE, "..", ".."), stdio: "ignore" },
  );
  await waitFor(
    () => fetch(`${BASE}/openapi.json`).then((r) => r.status),
    (status) => status === 200,
    "service startup",
  );
});

afterAll(() => {
  server?.kill();
});

describe("labeling loop end to end", () => {
  let app: App;

  async function labelBatch(expectedCards: number): Promise<void> {
    await waitFor(
      () => document.querySelectorAll(".card").length,
      (n) => n >= expectedCards,
      `${expectedCards} cards on screen`,
    );
    for (let i = 0; i < expectedCards; i++) {
      const before = document.querySelectorAll(".card").length;
      const button = document.querySelector<HTMLButtonElement>(".card .label.pos");
      expect(button).toBeTruthy();
      button!.click();
      await waitFor(
        () => document.querySelectorAll(".card").length,
        (n) => n !== before || i === expectedCards - 1,
        "optimistic card removal",
      );
    }
  }

  it("labels two full batches and mirrors GET /metrics in the chart", async () => {
    document.body.innerHTML = '<main id="app"></main>';
    app = boot(document.getElementById("app")!, BASE);
    app.stopPolling(); // the test drives refreshes itself

    // setup view: the form ships with the 10-row sample core set
    const textarea = document.querySelector<HTMLTextAreaElement>("#core-csv")!;
    expect(textarea.value.split("\n")).toHaveLength(11); // header + 10 rows
    const form = document.querySelector<HTMLFormElement>("form.setup")!;
    form.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));

    await waitFor(() => app.state.view, (v) => v === "label", "labeling view");
    expect(app.state.session?.batch_size).toBe(5);

    await labelBatch(5);
    await waitFor(() => app.state.modelVersion, (v) => v === 1, "first retrain");

    await app.refreshQueue();
    await labelBatch(5);
    await waitFor(() => app.state.modelVersion, (v) => v === 2, "second retrain");

    const status = document.querySelector("#status")!.textContent!;
    expect(status).toContain("model v2");

    // chart must mirror the wire metrics verbatim
    const resp = await fetch(`${BASE}/sessions/${app.state.session!.session_id}/metrics`);
    const wire = (await resp.json()) as {
      steps: { step: number; n_labeled: number; mean_uncertainty: number }[];
    };
    expect(wire.steps).toHaveLength(3);
    const points = [
      ...document.querySelectorAll('.point[data-series="mean_uncertainty"]'),
    ];
    expect(points).toHaveLength(3);
    for (const [i, step] of wire.steps.entries()) {
      expect(points[i]!.getAttribute("data-value")).toBe(String(step.mean_uncertainty));
      expect(points[i]!.getAttribute("data-x")).toBe(String(step.n_labeled));
      expect(points[i]!.getAttribute("data-step")).toBe(String(step.step));
    }

    // provenance popover: click a highlighted word, expect the history
    const swap = document.querySelector<HTMLButtonElement>(".card .swap");
    if (swap) {
      swap.click();
      await waitFor(
        () => document.querySelector(".popover"),
        (n) => n !== null,
        "provenance popover",
      );
      expect(document.querySelector(".popover .repl")).toBeTruthy();
    }
  });
});
