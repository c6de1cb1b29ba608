/**
 * Session controller: the load / constrain / apply / revert loop.
 *
 * Holds everything the console displays. All numbers come from service
 * responses; the controller's only arithmetic is the containment check
 * of exact values against their guaranteed bands, which the service
 * promises anyway (violations are logged, never hidden).
 */

import {
  ApiClient,
  ApiError,
  type EventRef,
  type Evidence,
  type NetworkDocument,
  type ParamRef,
  type Recommendation,
  type WatchReport,
} from "./api.js";

export interface HistoryEntry {
  version: number;
  note: string;
}

export interface SessionState {
  id: string | null;
  version: number;
  history: HistoryEntry[];
  document: NetworkDocument | null;
  evidence: Evidence;
  constraintText: string;
  satisfied: boolean | null;
  recommendations: Recommendation[];
  watches: WatchReport[];
  busy: boolean;
  error: string | null;
  violations: string[];
}

const BAND_TOLERANCE = 1e-9;

function emptyState(): SessionState {
  return {
    id: null,
    version: 0,
    history: [],
    document: null,
    evidence: {},
    constraintText: "",
    satisfied: null,
    recommendations: [],
    watches: [],
    busy: false,
    error: null,
    violations: [],
  };
}

export class TuningSession {
  readonly state: SessionState = emptyState();
  private listeners: Array<(state: SessionState) => void> = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private fail(error: unknown): void {
    this.state.error =
      error instanceof ApiError || error instanceof Error
        ? error.message
        : String(error);
    this.notify();
  }

  /** Upload a document; on success the whole session starts fresh. */
  async loadNetwork(documentText: string): Promise<boolean> {
    try {
      const { id } = await this.api.uploadNetwork(documentText);
      const described = await this.api.describe(id);
      Object.assign(this.state, emptyState());
      this.state.id = id;
      this.state.version = described.version;
      this.state.document = described.document;
      this.state.history = [{ version: 0, note: "loaded" }];
      this.notify();
      return true;
    } catch (error) {
      // an invalid document leaves the previous session untouched
      this.fail(error);
      return false;
    }
  }

  setEvidence(variable: string, state: string | null): void {
    if (state === null) {
      delete this.state.evidence[variable];
    } else {
      this.state.evidence[variable] = state;
    }
    this.notify();
  }

  async addWatch(target: EventRef): Promise<void> {
    if (!this.state.id) {
      return;
    }
    try {
      const { watches } = await this.api.addWatch(
        this.state.id,
        { ...this.state.evidence },
        target,
      );
      this.updateWatches(watches);
      this.state.error = null;
    } catch (error) {
      this.fail(error);
      return;
    }
    this.notify();
  }

  /**
   * Run the constraint workbench: ranked enforcing changes for the
   * current evidence. The constrained event is auto-registered as a
   * watch so applying a change shows its movement immediately.
   */
  async runConstraint(constraintText: string): Promise<void> {
    if (!this.state.id) {
      return;
    }
    this.state.constraintText = constraintText;
    try {
      const targets = constraintEvents(constraintText);
      const known = new Set(
        this.state.watches.map((w) => watchKey(w.evidence, w.target)),
      );
      for (const target of targets) {
        if (!known.has(watchKey(this.state.evidence, target))) {
          const { watches } = await this.api.addWatch(
            this.state.id,
            { ...this.state.evidence },
            target,
          );
          this.updateWatches(watches);
        }
      }
      const result = await this.api.recommend(
        this.state.id,
        { ...this.state.evidence },
        constraintText,
      );
      this.state.satisfied = result.satisfied;
      this.state.recommendations = result.recommendations;
      this.state.error = null;
    } catch (error) {
      this.state.satisfied = null;
      this.state.recommendations = [];
      this.fail(error);
      return;
    }
    this.notify();
  }

  async applyRecommendation(index: number): Promise<void> {
    const rec = this.state.recommendations[index];
    if (rec) {
      await this.applyParameter(rec.param, rec.new_tau, rec.label);
    }
  }

  /** One in-flight apply at a time; concurrent clicks are dropped. */
  async applyParameter(
    param: ParamRef,
    newTau: number,
    note?: string,
  ): Promise<void> {
    if (!this.state.id || this.state.busy) {
      return;
    }
    this.state.busy = true;
    this.notify();
    try {
      const result = await this.api.apply(this.state.id, param, newTau);
      this.state.version = result.version;
      this.state.history.push({
        version: result.version,
        note: note ?? `${param.variable} -> ${newTau.toFixed(4)}`,
      });
      this.updateWatches(result.watches);
      const described = await this.api.describe(this.state.id, result.version);
      this.state.document = described.document;
      if (this.state.constraintText) {
        const again = await this.api.recommend(
          this.state.id,
          { ...this.state.evidence },
          this.state.constraintText,
        );
        this.state.satisfied = again.satisfied;
        this.state.recommendations = again.recommendations;
      }
      this.state.error = null;
    } catch (error) {
      this.fail(error);
    } finally {
      this.state.busy = false;
      this.notify();
    }
  }

  async revert(version: number): Promise<void> {
    if (!this.state.id || this.state.busy) {
      return;
    }
    this.state.busy = true;
    this.notify();
    try {
      const result = await this.api.revert(this.state.id, version);
      this.state.version = result.version;
      this.state.history.push({
        version: result.version,
        note: `revert to v${version}`,
      });
      this.updateWatches(result.watches);
      const described = await this.api.describe(this.state.id, result.version);
      this.state.document = described.document;
      if (this.state.constraintText) {
        const again = await this.api.recommend(
          this.state.id,
          { ...this.state.evidence },
          this.state.constraintText,
        );
        this.state.satisfied = again.satisfied;
        this.state.recommendations = again.recommendations;
      }
      this.state.error = null;
    } catch (error) {
      this.fail(error);
    } finally {
      this.state.busy = false;
      this.notify();
    }
  }

  /** Current displayed value of a watch, by target. */
  watchValue(target: EventRef): number | null {
    const watch = this.state.watches.find(
      (w) => w.target.variable === target.variable
        && w.target.state === target.state,
    );
    return watch?.exact ?? null;
  }

  private updateWatches(reports: WatchReport[]): void {
    for (const report of reports) {
      const { exact, interval } = report;
      if (exact !== null && exact !== undefined && interval) {
        const [low, high] = interval;
        if (exact < low - BAND_TOLERANCE || exact > high + BAND_TOLERANCE) {
          const message = `band violation: ${report.target.variable}=`
            + `${report.target.state} exact ${exact} outside `
            + `[${low}, ${high}]`;
          this.state.violations.push(message);
          console.error(message);
        }
      }
    }
    this.state.watches = reports;
  }
}

function watchKey(evidence: Evidence, target: EventRef): string {
  const pairs = Object.entries(evidence).sort();
  return JSON.stringify([pairs, target.variable, target.state]);
}

/** Pull the queried events out of a constraint expression. */
export function constraintEvents(text: string): EventRef[] {
  const events: EventRef[] = [];
  const pattern = /P\(\s*([^()=\s]+)\s*=\s*([^()=\s]+)\s*\)/g;
  for (const match of text.matchAll(pattern)) {
    const candidate = { variable: match[1], state: match[2] };
    if (!events.some((e) => e.variable === candidate.variable
        && e.state === candidate.state)) {
      events.push(candidate);
    }
  }
  return events;
}
