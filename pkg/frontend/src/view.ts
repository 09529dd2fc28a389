/** DOM rendering for the two views plus keyboard wiring. Pure presentation:
 *  every number shown is a service response field. */

import type { Provenance, QueryCard } from "./api.js";
import { renderChart } from "./chart.js";
import { highlightSegments, substitutedPositions } from "./highlight.js";
import type { App, AppState } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  for (const child of children) node.append(child);
  return node;
}

const SAMPLE_CSV = [
  "label,text",
  "1,The film was wonderful .",
  "0,The movie was dreadful .",
  "1,I love this film .",
  "0,I hate this picture .",
  "1,The acting was superb .",
  "0,The plot was boring .",
  "1,We would recommend this film .",
  "0,We would avoid this movie .",
  "1,It was a delightful story .",
  "0,It was a tedious story .",
].join("\n");

function setupView(app: App, state: AppState): HTMLElement {
  const textarea = el("textarea", {
    id: "core-csv",
    rows: "12",
    placeholder: "label,text\n1,The film was wonderful .\n0,The plot was boring .",
    "aria-label": "core set CSV",
  });
  textarea.value = SAMPLE_CSV;
  const file = el("input", { type: "file", id: "core-file", accept: ".csv,text/csv" });
  file.addEventListener("change", () => {
    const chosen = file.files?.[0];
    if (!chosen) return;
    void chosen.text().then((text) => {
      textarea.value = text;
    });
  });
  const method = el("select", { id: "method" });
  for (const m of ["US-HC-MQ", "US-BS-MQ", "S-HC-MQ", "S-MQ"]) {
    method.append(el("option", { value: m }, [m]));
  }
  const seed = el("input", { id: "seed", type: "number", value: "0" });
  const batch = el("input", { id: "batch-size", type: "number", value: "5", min: "1" });
  const errors = el(
    "ul",
    { id: "setup-errors", class: "errors" },
    state.setupErrors.map((e) => el("li", {}, [e])),
  );
  const button = el("button", { id: "create-session", type: "submit" }, [
    state.busy ? "creating session…" : "Start labeling",
  ]);
  const form = el("form", { class: "setup" }, [
    el("h2", {}, ["New labeling session"]),
    el("p", {}, [
      "Paste or upload a small labeled core set (CSV with a label,text header). ",
      "The engine expands it into fresh sentences for you to label.",
    ]),
    textarea,
    el("div", { class: "row" }, [
      el("label", {}, ["method ", method]),
      el("label", {}, ["batch size ", batch]),
      el("label", {}, ["seed ", seed]),
      el("label", { class: "file-label" }, ["or upload: ", file]),
    ]),
    errors,
    button,
  ]);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void app.createSession(textarea.value, {
      method: method.value,
      batch_size: Number(batch.value) || 5,
      seed: Number(seed.value) || 0,
    });
  });
  return form;
}

function provenancePopover(prov: Provenance): HTMLElement {
  const steps = prov.chain.map((s) =>
    el("li", {}, [
      el("span", { class: "orig" }, [s.original]),
      " → ",
      el("span", { class: "repl" }, [s.replacement]),
      el("span", { class: "dist" }, [` (distance ${s.distance.toFixed(4)})`]),
    ]),
  );
  return el("div", { class: "popover", role: "dialog" }, [
    el("p", { class: "root-text" }, ["root: ", prov.root_text]),
    el("ol", {}, steps),
  ]);
}

function cardView(app: App, card: QueryCard, focused: boolean): HTMLElement {
  const segments = highlightSegments(card.text, card.chain);
  const sentence = el("p", { class: "sentence" });
  const edited = substitutedPositions(card.chain);
  for (const seg of segments) {
    if (seg.highlighted && seg.tokenIndex !== null) {
      const ops = edited.get(seg.tokenIndex) ?? [];
      const first = ops[0];
      const title = first ? `was “${first.original}”` : "";
      const mark = el(
        "button",
        { class: "swap", "data-token": String(seg.tokenIndex), title, type: "button" },
        [seg.text],
      );
      mark.addEventListener("click", () => {
        void app.client
          .getProvenance(app.state.session!.session_id, card.query_id)
          .then((prov) => {
            const old = sentence.querySelector(".popover");
            if (old) old.remove();
            else sentence.append(provenancePopover(prov));
          });
      });
      sentence.append(mark);
    } else {
      sentence.append(seg.text);
    }
  }
  const positive = el("button", { class: "label pos", type: "button" }, ["Positive (p)"]);
  positive.addEventListener("click", () => void app.label(card.query_id, 1));
  const negative = el("button", { class: "label neg", type: "button" }, ["Negative (n)"]);
  negative.addEventListener("click", () => void app.label(card.query_id, 0));
  const heuristic =
    card.heuristic_value === null ? "" : `uncertainty ${card.heuristic_value.toFixed(3)}`;
  return el(
    "article",
    {
      class: focused ? "card focused" : "card",
      "data-query-id": card.query_id,
      tabindex: "0",
    },
    [
      sentence,
      el("footer", {}, [
        el("span", { class: "heuristic" }, [heuristic]),
        el("span", { class: "spacer" }, [""]),
        negative,
        positive,
      ]),
    ],
  );
}

function labelView(app: App, state: AppState): HTMLElement {
  const cards = state.cards.map((c, i) => cardView(app, c, i === state.focusIndex));
  const chart = el("div", { id: "chart" });
  chart.innerHTML = renderChart(state.metrics);
  const status = el("p", { id: "status" }, [
    `model v${state.modelVersion} · ${state.cards.length} pending · `,
    `${state.metrics[state.metrics.length - 1]?.n_labeled ?? 0} labels acquired`,
  ]);
  return el("section", { class: "labeling" }, [
    el("h2", {}, ["Label the queue"]),
    el("p", { class: "hint" }, [
      "j/k or arrows move · p labels positive · n labels negative · ",
      "click a highlighted word for its substitution history",
    ]),
    status,
    el("div", { id: "cards" }, cards.length ? cards : [el("p", { class: "empty" }, ["queue drained, synthesizing…"])]),
    el("h3", {}, ["Model response"]),
    chart,
  ]);
}

export function renderApp(root: HTMLElement, app: App, state: AppState): void {
  root.replaceChildren();
  if (state.offline) {
    const retry = el("button", { id: "retry", type: "button" }, ["retry"]);
    retry.addEventListener("click", () => {
      state.offline = false;
      if (state.view === "label") void app.refreshQueue();
      app.render(state);
    });
    root.append(
      el("div", { class: "banner", role: "alert" }, [
        "service unreachable — your work is kept locally; ",
        retry,
      ]),
    );
  }
  for (const toast of state.toasts) {
    const node = el("div", { class: `toast ${toast.kind}` }, [toast.message]);
    node.addEventListener("click", () => app.dismissToasts());
    root.append(node);
  }
  root.append(state.view === "setup" ? setupView(app, state) : labelView(app, state));
}

export function bindKeyboard(app: App): void {
  document.addEventListener("keydown", (ev) => {
    if (app.state.view !== "label") return;
    const target = ev.target as HTMLElement | null;
    if (target && ["TEXTAREA", "INPUT", "SELECT"].includes(target.tagName)) return;
    switch (ev.key) {
      case "j":
      case "ArrowDown":
        app.moveFocus(1);
        ev.preventDefault();
        break;
      case "k":
      case "ArrowUp":
        app.moveFocus(-1);
        ev.preventDefault();
        break;
      case "p":
      case "1":
        void app.labelFocused(1);
        ev.preventDefault();
        break;
      case "n":
      case "0":
        void app.labelFocused(0);
        ev.preventDefault();
        break;
    }
  });
}
