import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  DEBOUNCE_MS,
  WhatIfController,
  WhatIfView,
  buildQuestion,
  renderWhatIfChart,
  viewFromTurn,
} from "../src/whatif.js";
import { SeriesPayloadSchema, Turn, TurnSchema } from "../src/types.js";
import turnModel from "./fixtures/turn-fig-model.json";

const modelTurn = (): Turn => TurnSchema.parse(turnModel);

function makeController(turn: Turn = modelTurn()) {
  const sent: string[] = [];
  const views: WhatIfView[] = [];
  const controller = new WhatIfController({
    send: async (question) => {
      sent.push(question);
      return turn;
    },
    onRender: (view) => views.push(view),
  });
  return { controller, sent, views };
}

describe("debounced refresh", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("a rapid slider drag fires exactly one request", async () => {
    const { controller, sent } = makeController();
    // 20 slider positions 30 ms apart — all within the debounce window.
    for (let i = 0; i < 20; i++) {
      controller.update({ dimEnd: 100 + i });
      await vi.advanceTimersByTimeAsync(30);
    }
    expect(sent).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    expect(sent).toHaveLength(1);
    expect(sent[0]).toContain("DIM 50 and 119");
  });

  it("two settled interactions fire two requests", async () => {
    const { controller, sent } = makeController();
    controller.update({ dimStart: 10 });
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    controller.update({ dimStart: 20 });
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    expect(sent).toHaveLength(2);
  });

  it("no request before the window closes", async () => {
    const { controller, sent } = makeController();
    controller.update({ parities: [1, 2] });
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS - 10);
    expect(sent).toHaveLength(0);
  });

  it("invalid selections render a message without a request", async () => {
    const { controller, sent, views } = makeController();
    controller.update({ regions: [] });
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    expect(sent).toHaveLength(0);
    expect(views.at(-1)).toEqual({ kind: "empty", message: "select at least one region" });
  });

  it("a send failure clears the chart with a message", async () => {
    const views: WhatIfView[] = [];
    const controller = new WhatIfController({
      send: async () => {
        throw new Error("no parameter set for MARS");
      },
      onRender: (view) => views.push(view),
    });
    controller.update({ regions: ["MARS"] });
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 1);
    expect(views.at(-1)).toMatchObject({ kind: "empty" });
    expect((views.at(-1) as { message: string }).message).toContain("MARS");
  });

  it("DIM values clamp to 1..305", () => {
    const { controller } = makeController();
    controller.update({ dimStart: -5, dimEnd: 999 });
    expect(controller.getState().dimStart).toBe(1);
    expect(controller.getState().dimEnd).toBe(305);
  });
});

describe("question synthesis", () => {
  it("names every region, parity and the DIM bounds", () => {
    const question = buildQuestion({
      regions: ["US", "EU"],
      parities: [2, 3],
      dimStart: 50,
      dimEnd: 120,
    });
    expect(question).toContain("US and EU");
    expect(question).toContain("parity 2 and 3");
    expect(question).toContain("DIM 50 and 120");
  });
});

describe("chart rendering", () => {
  const seriesFromFixture = () => {
    const view = viewFromTurn(modelTurn());
    if (view.kind !== "chart") throw new Error("fixture has no series");
    return view.series;
  };

  it("draws one line per (region, parity) series", () => {
    const series = seriesFromFixture();
    expect(series.map((s) => s.label)).toEqual(["US parity 3", "EU parity 3"]);
    const svg = renderWhatIfChart(series);
    expect(svg.match(/<polyline/g)).toHaveLength(2);
    expect(svg.match(/class="legend"/g)).toHaveLength(2);
  });

  it("single series draws a single line", () => {
    const svg = renderWhatIfChart([seriesFromFixture()[0]]);
    expect(svg.match(/<polyline/g)).toHaveLength(1);
  });

  it("plots exactly the server's values", () => {
    // The fixture's series payload and the inlined server SVG came from the
    // same engine values; the client chart consumes the series verbatim.
    const turn = modelTurn();
    const attachment = turn.answer!.attachments.find((a) => a.kind === "series")!;
    const series = SeriesPayloadSchema.parse(attachment.payload);
    expect(series[0].points).toHaveLength(71); // DIM 50..120 inclusive
    const svg = renderWhatIfChart(series);
    expect(svg).toContain("US parity 3");
  });

  it("answers without series become a message view", () => {
    const turn = modelTurn();
    turn.answer = { ...turn.answer!, attachments: [] };
    expect(viewFromTurn(turn)).toEqual({
      kind: "empty",
      message: turn.answer.body,
    });
  });
});
