/**
 * DOM rendering for the console. Pure functions from state to elements;
 * user intents come back through the callbacks each renderer takes.
 */

import type {
  EventRef,
  NetworkDocument,
  ParamRef,
  Recommendation,
  WatchReport,
} from "./api.js";
import type { EnvelopeRow } from "./csv.js";
import { DEFAULT_LAYOUT, layoutNetwork } from "./layout.js";
import type { HistoryEntry, SessionState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderDag(container: HTMLElement, doc: NetworkDocument): void {
  container.textContent = "";
  const layout = layoutNetwork(doc);
  const { nodeWidth, nodeHeight } = DEFAULT_LAYOUT;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));
  svg.classList.add("dag");
  for (const edge of layout.edges) {
    const path = document.createElementNS(SVG_NS, "path");
    const midY = (edge.y1 + edge.y2) / 2;
    path.setAttribute(
      "d",
      `M${edge.x1},${edge.y1} C${edge.x1},${midY} ${edge.x2},${midY} `
        + `${edge.x2},${edge.y2}`,
    );
    path.classList.add("dag-edge");
    svg.appendChild(path);
  }
  for (const node of layout.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(node.x));
    rect.setAttribute("y", String(node.y));
    rect.setAttribute("width", String(nodeWidth));
    rect.setAttribute("height", String(nodeHeight));
    rect.setAttribute("rx", "8");
    rect.classList.add("dag-node");
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(node.x + nodeWidth / 2));
    label.setAttribute("y", String(node.y + nodeHeight / 2 + 4));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.name;
    group.append(rect, label);
    svg.appendChild(group);
  }
  container.appendChild(svg);
}

export function renderCptTables(
  container: HTMLElement,
  doc: NetworkDocument,
  onEdit: (param: ParamRef, value: number) => void,
): void {
  container.textContent = "";
  for (const variable of doc.variables) {
    const binary = variable.states.length === 2;
    const section = el("details", "cpt-block");
    const summary = el("summary", undefined,
      `${variable.name}  (${variable.states.join(" / ")})`);
    section.appendChild(summary);
    const table = el("table", "cpt-table");
    const head = el("tr");
    for (const parent of variable.parents) {
      head.appendChild(el("th", undefined, parent));
    }
    for (const state of variable.states) {
      head.appendChild(el("th", undefined, `P(${state})`));
    }
    table.appendChild(head);
    const parentStates = variable.parents.map(
      (p) => doc.variables.find((v) => v.name === p)!.states,
    );
    variable.cpt.forEach((row, rowIndex) => {
      const tr = el("tr");
      const assignment: Record<string, string> = {};
      let rest = rowIndex;
      for (let i = variable.parents.length - 1; i >= 0; i--) {
        const states = parentStates[i];
        assignment[variable.parents[i]] = states[rest % states.length];
        rest = Math.floor(rest / states.length);
      }
      for (const parent of variable.parents) {
        tr.appendChild(el("td", "cpt-parent", assignment[parent]));
      }
      row.forEach((value, stateIndex) => {
        const td = el("td");
        const input = el("input") as HTMLInputElement;
        input.type = "number";
        input.step = "0.001";
        input.min = "0";
        input.max = "1";
        input.value = value.toPrecision(6).replace(/\.?0+$/, "");
        const error = el("span", "inline-error");
        input.addEventListener("change", () => {
          error.textContent = "";
          if (!binary) {
            error.textContent = "only binary rows are tunable";
            input.value = value.toPrecision(6).replace(/\.?0+$/, "");
            return;
          }
          onEdit(
            {
              variable: variable.name,
              state: variable.states[stateIndex],
              parents: assignment,
            },
            Number(input.value),
          );
        });
        td.append(input, error);
        tr.appendChild(td);
      });
      table.appendChild(tr);
    });
    section.appendChild(table);
    container.appendChild(section);
  }
}

export function renderEvidencePanel(
  container: HTMLElement,
  doc: NetworkDocument,
  evidence: Record<string, string>,
  onToggle: (variable: string, state: string | null) => void,
): void {
  container.textContent = "";
  for (const variable of doc.variables) {
    const row = el("label", "evidence-row");
    row.appendChild(el("span", "evidence-name", variable.name));
    const select = el("select") as HTMLSelectElement;
    const none = el("option", undefined, "(unobserved)");
    none.value = "";
    select.appendChild(none);
    for (const state of variable.states) {
      const option = el("option", undefined, state);
      option.value = state;
      select.appendChild(option);
    }
    select.value = evidence[variable.name] ?? "";
    select.addEventListener("change", () => {
      onToggle(variable.name, select.value === "" ? null : select.value);
    });
    row.appendChild(select);
    container.appendChild(row);
  }
}

export function renderRecommendations(
  container: HTMLElement,
  state: SessionState,
  onApply: (index: number) => void,
): void {
  container.textContent = "";
  if (state.satisfied === true) {
    container.appendChild(
      el("p", "status-good", "Constraint already satisfied."));
    return;
  }
  if (state.satisfied === null) {
    container.appendChild(
      el("p", "status-dim", "Run a constraint to see enforcing changes."));
    return;
  }
  if (state.recommendations.length === 0) {
    container.appendChild(el(
      "p",
      "status-bad",
      "No single parameter change can enforce this constraint: every "
        + "knob is either irrelevant to it or cannot move far enough.",
    ));
    return;
  }
  const table = el("table", "rec-table");
  const head = el("tr");
  for (const title of ["parameter", "current", "suggested", "delta",
                       "log-odds", ""]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);
  state.recommendations.forEach((rec: Recommendation, index: number) => {
    const tr = el("tr");
    tr.appendChild(el("td", "rec-label", rec.label));
    tr.appendChild(el("td", undefined, rec.current_tau.toFixed(4)));
    tr.appendChild(el("td", undefined, rec.new_tau.toFixed(4)));
    tr.appendChild(el("td", undefined,
      `${rec.minimal_delta >= 0 ? "+" : ""}${rec.minimal_delta.toFixed(4)}`));
    tr.appendChild(el("td", undefined,
      rec.log_odds_distance === null
        ? "inf"
        : rec.log_odds_distance.toFixed(3)));
    const cell = el("td");
    const button = el("button", "apply-btn", "apply") as HTMLButtonElement;
    button.disabled = state.busy;
    button.addEventListener("click", () => onApply(index));
    cell.appendChild(button);
    tr.appendChild(cell);
    table.appendChild(tr);
  });
  container.appendChild(table);
}

/** A watch row: guaranteed band as a track, exact value as a marker. */
export function renderWatches(
  container: HTMLElement,
  watches: WatchReport[],
): void {
  container.textContent = "";
  if (watches.length === 0) {
    container.appendChild(
      el("p", "status-dim", "No watch queries registered."));
    return;
  }
  for (const watch of watches) {
    const row = el("div", "watch-row");
    const label = `P(${watch.target.variable}=${watch.target.state} | `
      + `${Object.entries(watch.evidence)
        .map(([k, v]) => `${k}=${v}`).join(", ") || "no evidence"})`;
    row.appendChild(el("div", "watch-label", label));
    const track = el("div", "watch-track");
    if (watch.interval) {
      const [low, high] = watch.interval;
      const band = el("div",
        watch.degenerate ? "watch-band degenerate" : "watch-band");
      band.style.left = `${(low * 100).toFixed(2)}%`;
      band.style.width = `${(Math.max(high - low, 0.002) * 100).toFixed(2)}%`;
      band.title = `guaranteed [${low.toFixed(4)}, ${high.toFixed(4)}]`;
      track.appendChild(band);
    }
    if (watch.exact !== null && watch.exact !== undefined) {
      const marker = el("div", "watch-marker");
      marker.style.left = `${(watch.exact * 100).toFixed(2)}%`;
      marker.title = `exact ${watch.exact.toFixed(4)}`;
      track.appendChild(marker);
      row.appendChild(el("div", "watch-value", watch.exact.toFixed(4)));
    } else {
      row.appendChild(el("div", "watch-value", "undefined"));
    }
    row.appendChild(track);
    container.appendChild(row);
  }
}

export function renderHistory(
  container: HTMLElement,
  history: HistoryEntry[],
  current: number,
  busy: boolean,
  onRevert: (version: number) => void,
): void {
  container.textContent = "";
  for (const entry of history) {
    const chip = el("button",
      entry.version === current ? "version-chip current" : "version-chip",
      `v${entry.version}`) as HTMLButtonElement;
    chip.title = entry.note;
    chip.disabled = busy || entry.version === current;
    chip.addEventListener("click", () => onRevert(entry.version));
    container.appendChild(chip);
  }
}

/** Nested permissible-change curves, drawn from the service's CSV. */
export function renderEnvelopeChart(
  container: HTMLElement,
  rows: EnvelopeRow[],
  width = 420,
  height = 220,
): void {
  container.textContent = "";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.classList.add("envelope-chart");
  const maxDelta = Math.max(
    ...rows.map((r) => Math.max(r.deltaPlusOuter, r.deltaMinusOuter)));
  const sx = (p: number) => p * width;
  const sy = (d: number) => height - (d / maxDelta) * (height - 12) - 6;
  const curves: Array<[keyof EnvelopeRow, string]> = [
    ["deltaPlusOuter", "outer"],
    ["deltaPlusInner", "inner"],
    ["deltaMinusOuter", "outer dashed"],
    ["deltaMinusInner", "inner dashed"],
  ];
  for (const [key, cls] of curves) {
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute(
      "points",
      rows.map((r) => `${sx(r.p).toFixed(1)},${sy(r[key] as number).toFixed(1)}`)
        .join(" "),
    );
    line.setAttribute("class", `envelope-line ${cls}`);
    svg.appendChild(line);
  }
  container.appendChild(svg);
}

export function watchTargetsOf(doc: NetworkDocument): EventRef[] {
  return doc.variables.map((v) => ({ variable: v.name, state: v.states[0] }));
}
