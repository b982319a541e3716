/**
 * What-if explorer: region/parity multi-selects plus a DIM range slider.
 *
 * Every state change schedules a refresh; rapid changes collapse into one
 * request 250 ms after the last change settles (classic trailing debounce).
 * The response's curve series are drawn client-side — one line per
 * (region, parity) parameter set — so sliding feels immediate, while the
 * values themselves always come from the engine.
 */

import { SeriesPayload, SeriesPayloadSchema, Turn } from "./types.js";
import { escapeHtml } from "./render.js";

export const DEBOUNCE_MS = 250;
export const DIM_MIN = 1;
export const DIM_MAX = 305;

export interface WhatIfState {
  regions: string[];
  parities: number[];
  dimStart: number;
  dimEnd: number;
}

export type WhatIfView =
  | { kind: "idle" }
  | { kind: "loading" }
  | { kind: "chart"; series: SeriesPayload; body: string }
  | { kind: "empty"; message: string };

function clampDim(value: number): number {
  return Math.min(DIM_MAX, Math.max(DIM_MIN, Math.round(value)));
}

export function validateState(state: WhatIfState): string | null {
  if (state.regions.length === 0) return "select at least one region";
  if (state.parities.length === 0) return "select at least one parity";
  if (state.dimStart > state.dimEnd) return "DIM range is reversed";
  return null;
}

/** The model-route question synthesized from the current selections. */
export function buildQuestion(state: WhatIfState): string {
  const regions = state.regions.join(" and ");
  const parities = state.parities.join(" and ");
  return (
    `How much milk should I expect from my ${regions} parity ${parities} ` +
    `dairy cows between DIM ${state.dimStart} and ${state.dimEnd}?`
  );
}

export interface WhatIfOptions {
  /** Sends a model-route chat request; injected so tests count calls. */
  send: (question: string) => Promise<Turn>;
  onRender: (view: WhatIfView) => void;
  debounceMs?: number;
}

export class WhatIfController {
  private state: WhatIfState = {
    regions: ["US"],
    parities: [1],
    dimStart: 50,
    dimEnd: 120,
  };
  private timer: ReturnType<typeof setTimeout> | null = null;
  private generation = 0;

  constructor(private readonly options: WhatIfOptions) {}

  getState(): WhatIfState {
    return { ...this.state, regions: [...this.state.regions], parities: [...this.state.parities] };
  }

  /** Apply a change and (re)start the settle timer. */
  update(change: Partial<WhatIfState>): void {
    const next = { ...this.state, ...change };
    next.dimStart = clampDim(next.dimStart);
    next.dimEnd = clampDim(next.dimEnd);
    this.state = next;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.refresh();
    }, this.options.debounceMs ?? DEBOUNCE_MS);
  }

  /** Fires once per settled interaction; stale responses are dropped. */
  private async refresh(): Promise<void> {
    const invalid = validateState(this.state);
    if (invalid !== null) {
      this.options.onRender({ kind: "empty", message: invalid });
      return;
    }
    const generation = ++this.generation;
    this.options.onRender({ kind: "loading" });
    let turn: Turn;
    try {
      turn = await this.options.send(buildQuestion(this.state));
    } catch (error) {
      if (generation !== this.generation) return;
      this.options.onRender({ kind: "empty", message: String(error) });
      return;
    }
    if (generation !== this.generation) return;
    this.options.onRender(viewFromTurn(turn));
  }
}

/** Chart when the turn carries curve data, otherwise the engine's message. */
export function viewFromTurn(turn: Turn): WhatIfView {
  const attachment = turn.answer?.attachments.find((a) => a.kind === "series");
  if (turn.answer === null || attachment === undefined) {
    return { kind: "empty", message: turn.answer?.body ?? "no answer" };
  }
  return {
    kind: "chart",
    series: SeriesPayloadSchema.parse(attachment.payload),
    body: turn.answer.body,
  };
}

const CHART_WIDTH = 640;
const CHART_HEIGHT = 360;
const MARGIN = 40;
const LINE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/**
 * Client-side SVG chart: one polyline per series, drawn from the same
 * (DIM, yield) values the server plots.
 */
export function renderWhatIfChart(series: SeriesPayload): string {
  const points = series.flatMap((s) => s.points);
  if (series.length === 0 || points.length === 0) {
    return `<p class="whatif-empty">no curve data</p>`;
  }
  const xs = points.map(([t]) => t);
  const ys = points.map(([, y]) => y);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMax = Math.max(...ys, 1e-9);
  const sx = (t: number) =>
    MARGIN + ((t - xMin) / Math.max(xMax - xMin, 1e-9)) * (CHART_WIDTH - 2 * MARGIN);
  const sy = (y: number) => CHART_HEIGHT - MARGIN - (y / yMax) * (CHART_HEIGHT - 2 * MARGIN);
  const lines = series.map((s, i) => {
    const path = s.points.map(([t, y]) => `${sx(t).toFixed(1)},${sy(y).toFixed(1)}`).join(" ");
    const color = LINE_COLORS[i % LINE_COLORS.length];
    return `<polyline fill="none" stroke="${color}" stroke-width="2" points="${path}"><title>${escapeHtml(s.label)}</title></polyline>`;
  });
  const legend = series.map((s, i) => {
    const color = LINE_COLORS[i % LINE_COLORS.length];
    return `<text class="legend" x="${CHART_WIDTH - MARGIN - 150}" y="${MARGIN + i * 16}" fill="${color}">${escapeHtml(s.label)}</text>`;
  });
  return (
    `<svg class="whatif-chart" viewBox="0 0 ${CHART_WIDTH} ${CHART_HEIGHT}" xmlns="http://www.w3.org/2000/svg">` +
    `<line x1="${MARGIN}" y1="${CHART_HEIGHT - MARGIN}" x2="${CHART_WIDTH - MARGIN}" y2="${CHART_HEIGHT - MARGIN}" stroke="#333"/>` +
    `<line x1="${MARGIN}" y1="${MARGIN}" x2="${MARGIN}" y2="${CHART_HEIGHT - MARGIN}" stroke="#333"/>` +
    lines.join("") +
    legend.join("") +
    `</svg>`
  );
}
