/** Typed client for the labeling service. The UI never computes labels,
 *  accuracies, or uncertainties itself; everything displayed comes from
 *  these responses. */

export interface ChainStep {
  position: number;
  original: string;
  replacement: string;
}

export interface ProvenanceStep extends ChainStep {
  distance: number;
}

export interface QueryCard {
  query_id: string;
  text: string;
  chain: ChainStep[];
  heuristic_value: number | null;
}

export interface MetricsStep {
  step: number;
  n_labeled: number;
  model_version: number;
  accuracy: number | null;
  mean_uncertainty: number | null;
}

export interface SessionInfo {
  session_id: string;
  initial_accuracy: number | null;
  batch_size: number;
  method: string;
}

export interface LabelResult {
  labels_accepted: number;
  model_version: number;
  test_accuracy: number | null;
}

export interface Provenance {
  query_id: string;
  text: string;
  root_id: string;
  root_label: number | null;
  root_text: string;
  chain: ProvenanceStep[];
}

export interface SessionConfig {
  method?: string;
  pool_size?: number;
  batch_size?: number;
  seed?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Network-level failure (service unreachable), distinct from an API error. */
export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
  }
}

async function parseDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return resp.statusText;
  }
}

export class Client {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new OfflineError(err);
    }
    if (!resp.ok) {
      throw new ApiError(resp.status, await parseDetail(resp));
    }
    return (await resp.json()) as T;
  }

  createSession(
    coreCsv: string,
    config: SessionConfig = {},
    testCsv?: string,
  ): Promise<SessionInfo> {
    const body: Record<string, unknown> = { core_csv: coreCsv, config };
    if (testCsv !== undefined) body.test_csv = testCsv;
    return this.request<SessionInfo>("POST", "/sessions", body);
  }

  async getQueries(sessionId: string, limit?: number): Promise<QueryCard[]> {
    const qs = limit === undefined ? "" : `?limit=${limit}`;
    const data = await this.request<{ queries: QueryCard[] }>(
      "GET",
      `/sessions/${sessionId}/queries${qs}`,
    );
    return data.queries;
  }

  postLabels(
    sessionId: string,
    labels: { query_id: string; label: number }[],
  ): Promise<LabelResult> {
    return this.request<LabelResult>("POST", `/sessions/${sessionId}/labels`, {
      labels,
    });
  }

  async getMetrics(sessionId: string): Promise<MetricsStep[]> {
    const data = await this.request<{ steps: MetricsStep[] }>(
      "GET",
      `/sessions/${sessionId}/metrics`,
    );
    return data.steps;
  }

  getProvenance(sessionId: string, queryId: string): Promise<Provenance> {
    return this.request<Provenance>(
      "GET",
      `/sessions/${sessionId}/provenance/${queryId}`,
    );
  }
}
