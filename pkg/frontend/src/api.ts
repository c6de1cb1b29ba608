/**
 * Typed client for the belief-tuner HTTP API (/api/v1).
 *
 * Every number shown anywhere in the console comes out of one of these
 * calls; the client does no probabilistic computation of its own.
 */

export interface EventRef {
  variable: string;
  state: string;
}

export type Evidence = Record<string, string>;

export interface ParamRef {
  variable: string;
  state?: string;
  parents?: Record<string, string>;
}

export interface VariableDoc {
  name: string;
  states: string[];
  parents: string[];
  cpt: number[][];
}

export interface NetworkDocument {
  variables: VariableDoc[];
}

export interface Recommendation {
  param: Required<ParamRef>;
  label: string;
  current_tau: number;
  minimal_delta: number;
  new_tau: number;
  log_odds_distance: number | null;
  feasible_interval: [number, number];
  saturates: boolean;
}

export interface WatchReport {
  evidence: Evidence;
  target: EventRef;
  exact: number | null;
  interval?: [number, number] | null;
  degenerate?: boolean;
}

export interface RecommendResponse {
  satisfied: boolean;
  recommendations: Recommendation[];
  version: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, init);
    const text = await response.text();
    if (!response.ok) {
      let message = text;
      try {
        message = (JSON.parse(text) as { error?: string }).error ?? text;
      } catch {
        // non-JSON error body, keep the raw text
      }
      throw new ApiError(response.status, message);
    }
    return JSON.parse(text) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  uploadNetwork(document: string): Promise<{ id: string; version: number }> {
    return this.request("/networks", { method: "POST", body: document });
  }

  describe(id: string, version?: number): Promise<{
    id: string;
    version: number;
    latest: number;
    document: NetworkDocument;
  }> {
    const suffix = version === undefined ? "" : `?version=${version}`;
    return this.request(`/networks/${id}${suffix}`);
  }

  versions(id: string): Promise<{ versions: number[] }> {
    return this.request(`/networks/${id}/versions`);
  }

  query(
    id: string,
    evidence: Evidence,
    target: EventRef,
    version?: number,
  ): Promise<{ posterior: number; version: number }> {
    return this.post(`/networks/${id}/query`, { evidence, target, version });
  }

  recommend(
    id: string,
    evidence: Evidence,
    constraint: string,
  ): Promise<RecommendResponse> {
    return this.post(`/networks/${id}/recommend`, { evidence, constraint });
  }

  apply(
    id: string,
    param: ParamRef,
    newTau: number,
  ): Promise<{ version: number; watches: WatchReport[] }> {
    return this.post(`/networks/${id}/apply`, { param, new_tau: newTau });
  }

  revert(
    id: string,
    version: number,
  ): Promise<{ version: number; watches: WatchReport[] }> {
    return this.post(`/networks/${id}/revert`, { version });
  }

  addWatch(
    id: string,
    evidence: Evidence,
    target: EventRef,
  ): Promise<{ watches: WatchReport[] }> {
    return this.post(`/networks/${id}/watches`, { evidence, target });
  }

  listWatches(id: string): Promise<{ watches: WatchReport[] }> {
    return this.request(`/networks/${id}/watches`);
  }

  async envelopeCsv(
    q0: number,
    lo: number,
    hi: number,
    step = 0.01,
  ): Promise<string> {
    const params = `q0=${q0}&lo=${lo}&hi=${hi}&step=${step}`;
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/v1/bounds/envelope?${params}`,
    );
    const text = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, text);
    }
    return text;
  }
}
