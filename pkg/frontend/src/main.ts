/** Page wiring: one TuningSession driving the panels. */

import { ApiClient } from "./api.js";
import { parseEnvelopeCsv } from "./csv.js";
import {
  renderCptTables,
  renderDag,
  renderEnvelopeChart,
  renderEvidencePanel,
  renderHistory,
  renderRecommendations,
  renderWatches,
} from "./render.js";
import { SAMPLE_DOCUMENT } from "./sample.js";
import { TuningSession } from "./state.js";

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node;
}

function input(id: string): HTMLInputElement {
  return byId(id) as HTMLInputElement;
}

export function boot(): void {
  const api = new ApiClient(
    (input("service-url").value || "http://127.0.0.1:8374").replace(/\/$/, ""));
  const session = new TuningSession(api);

  session.onChange((state) => {
    byId("session-line").textContent = state.id
      ? `network ${state.id}, version ${state.version}`
      : "no network loaded";
    byId("error-line").textContent = state.error ?? "";
    byId("violation-line").textContent = state.violations.length
      ? `BAND VIOLATIONS LOGGED: ${state.violations.length}`
      : "";
    if (state.document) {
      renderDag(byId("dag"), state.document);
      renderCptTables(byId("cpts"), state.document,
        (param, value) => void session.applyParameter(param, value));
      renderEvidencePanel(byId("evidence"), state.document, state.evidence,
        (variable, value) => session.setEvidence(variable, value));
    }
    renderRecommendations(byId("recommendations"), state,
      (index) => void session.applyRecommendation(index));
    renderWatches(byId("watches"), state.watches);
    renderHistory(byId("history"), state.history, state.version, state.busy,
      (version) => void session.revert(version));
  });

  byId("load-btn").addEventListener("click", () => {
    void session.loadNetwork(
      (byId("document-text") as HTMLTextAreaElement).value);
  });
  byId("sample-btn").addEventListener("click", () => {
    (byId("document-text") as HTMLTextAreaElement).value = SAMPLE_DOCUMENT;
    void session.loadNetwork(SAMPLE_DOCUMENT);
  });
  byId("constraint-btn").addEventListener("click", () => {
    void session.runConstraint(input("constraint-text").value);
  });
  byId("watch-btn").addEventListener("click", () => {
    const [variable, state] = input("watch-text").value.split("=");
    if (variable && state) {
      void session.addWatch({ variable: variable.trim(),
                              state: state.trim() });
    }
  });
  byId("envelope-btn").addEventListener("click", () => {
    void (async () => {
      try {
        const csv = await api.envelopeCsv(
          Number(input("env-q0").value),
          Number(input("env-lo").value),
          Number(input("env-hi").value));
        renderEnvelopeChart(byId("envelope-chart"), parseEnvelopeCsv(csv));
      } catch (error) {
        byId("error-line").textContent = String(error);
      }
    })();
  });
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
