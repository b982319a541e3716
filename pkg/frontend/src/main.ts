/**
 * Browser entry point: wires the chat view, trace panel, and what-if
 * explorer to the DOM in index.html. All rendering logic lives in the
 * imported modules so it stays testable without a browser.
 */

import { ApiClient } from "./api.js";
import { ChatController } from "./chat.js";
import { renderTurn } from "./render.js";
import { renderTracePanel } from "./trace.js";
import {
  DIM_MAX,
  DIM_MIN,
  WhatIfController,
  WhatIfView,
  renderWhatIfChart,
} from "./whatif.js";

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function setupChat(): ChatController {
  const log = el<HTMLDivElement>("chat-log");
  const input = el<HTMLInputElement>("chat-input");
  const button = el<HTMLButtonElement>("chat-send");
  const banner = el<HTMLDivElement>("chat-error");
  const tracePanel = el<HTMLDivElement>("trace-panel");

  const chat = new ChatController({
    send: (question, session) => api.postChat(question, session),
    onRender: (state) => {
      log.innerHTML = state.turns.map(renderTurn).join("\n");
      banner.textContent = state.error ?? "";
      banner.hidden = state.error === null;
      button.disabled = state.pending;
      if (state.error === null && !state.pending) input.value = "";
      for (const article of log.querySelectorAll<HTMLElement>(".turn")) {
        article.addEventListener("click", async () => {
          const turnId = article.dataset.turnId;
          if (!turnId) return;
          try {
            const trace = await api.getTrace(turnId);
            tracePanel.innerHTML = renderTracePanel(trace.spans);
          } catch {
            tracePanel.innerHTML = renderTracePanel(null);
          }
        });
      }
      log.scrollTop = log.scrollHeight;
    },
  });

  const submit = () => {
    chat.setDraft(input.value);
    void chat.submit();
  };
  button.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") submit();
  });

  void api.getTurns().then((list) => chat.loadTurns(list.turns));
  return chat;
}

function setupWhatIf(): void {
  const chart = el<HTMLDivElement>("whatif-chart");
  const status = el<HTMLDivElement>("whatif-status");
  const regions = el<HTMLSelectElement>("whatif-regions");
  const parities = el<HTMLSelectElement>("whatif-parities");
  const dimStart = el<HTMLInputElement>("whatif-dim-start");
  const dimEnd = el<HTMLInputElement>("whatif-dim-end");
  for (const slider of [dimStart, dimEnd]) {
    slider.min = String(DIM_MIN);
    slider.max = String(DIM_MAX);
  }

  const controller = new WhatIfController({
    send: (question) => api.postChat(question, "whatif", "model_subagent"),
    onRender: (view: WhatIfView) => {
      switch (view.kind) {
        case "idle":
          status.textContent = "";
          break;
        case "loading":
          status.textContent = "updating…";
          break;
        case "empty":
          chart.innerHTML = "";
          status.textContent = view.message;
          break;
        case "chart":
          chart.innerHTML = renderWhatIfChart(view.series);
          status.textContent = view.body;
          break;
      }
    },
  });

  const selected = (select: HTMLSelectElement) =>
    Array.from(select.selectedOptions).map((o) => o.value);
  regions.addEventListener("change", () =>
    controller.update({ regions: selected(regions) }),
  );
  parities.addEventListener("change", () =>
    controller.update({ parities: selected(parities).map(Number) }),
  );
  dimStart.addEventListener("input", () =>
    controller.update({ dimStart: Number(dimStart.value) }),
  );
  dimEnd.addEventListener("input", () =>
    controller.update({ dimEnd: Number(dimEnd.value) }),
  );
  controller.update({});
}

document.addEventListener("DOMContentLoaded", () => {
  setupChat();
  setupWhatIf();
});
