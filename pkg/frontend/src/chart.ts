/** Inline SVG line chart of the metrics history: accuracy (when the session
 *  has a test set) and mean uncertainty versus labels acquired. Every point
 *  carries the raw service value verbatim in data attributes. */

import type { MetricsStep } from "./api.js";

export interface Series {
  name: string;
  color: string;
  points: { x: number; y: number; step: number }[];
}

export function chartSeries(steps: MetricsStep[]): Series[] {
  const series: Series[] = [];
  const accuracy = steps.filter((s) => s.accuracy !== null);
  if (accuracy.length > 0) {
    series.push({
      name: "accuracy",
      color: "#2563eb",
      points: accuracy.map((s) => ({ x: s.n_labeled, y: s.accuracy as number, step: s.step })),
    });
  }
  const unc = steps.filter((s) => s.mean_uncertainty !== null);
  if (unc.length > 0) {
    series.push({
      name: "mean_uncertainty",
      color: "#d97706",
      points: unc.map((s) => ({
        x: s.n_labeled,
        y: s.mean_uncertainty as number,
        step: s.step,
      })),
    });
  }
  return series;
}

const W = 460;
const H = 180;
const PAD = 34;

function sx(x: number, xmin: number, xmax: number): number {
  const span = xmax - xmin || 1;
  return PAD + ((x - xmin) / span) * (W - 2 * PAD);
}

function sy(y: number): number {
  return H - PAD - y * (H - 2 * PAD); // y is a rate in [0, 1]
}

export function renderChart(steps: MetricsStep[]): string {
  const series = chartSeries(steps);
  if (series.length === 0) return `<svg class="chart" viewBox="0 0 ${W} ${H}"></svg>`;
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const xmin = Math.min(...xs);
  const xmax = Math.max(...xs);
  const parts: string[] = [];
  parts.push(
    `<line class="axis" x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}"/>`,
    `<line class="axis" x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${H - PAD}"/>`,
    `<text class="axis-label" x="${W / 2}" y="${H - 6}">labels acquired</text>`,
  );
  for (const tick of [0, 0.5, 1]) {
    parts.push(
      `<text class="tick" x="${PAD - 6}" y="${sy(tick) + 3}" text-anchor="end">${tick}</text>`,
    );
  }
  for (const s of series) {
    const path = s.points
      .map((p) => `${sx(p.x, xmin, xmax).toFixed(1)},${sy(p.y).toFixed(1)}`)
      .join(" ");
    parts.push(`<polyline class="line" points="${path}" style="stroke:${s.color}"/>`);
    for (const p of s.points) {
      parts.push(
        `<circle class="point" data-series="${s.name}" data-step="${p.step}" ` +
          `data-x="${p.x}" data-value="${p.y}" cx="${sx(p.x, xmin, xmax).toFixed(1)}" ` +
          `cy="${sy(p.y).toFixed(1)}" r="3.5" style="fill:${s.color}"/>`,
      );
    }
  }
  const legend = series
    .map(
      (s, i) =>
        `<text class="legend" x="${W - PAD}" y="${PAD + 14 * i}" text-anchor="end" ` +
        `style="fill:${s.color}">${s.name}</text>`,
    )
    .join("");
  return `<svg class="chart" viewBox="0 0 ${W} ${H}">${parts.join("")}${legend}</svg>`;
}
