/** Typed client over the session API. All truth lives on the server. */

import type {
  CasebaseStats,
  CriteriaConfig,
  Envelope,
  HealthInfo,
  PerformanceCell,
  ReviewVerdict,
  ServerConfig,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly details?: unknown,
    public readonly status?: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface OpenSessionRequest {
  descriptors: number[];
  physician_actions: string[];
  acceptance_radius?: number;
  session_id?: string;
  /** Criteria + thresholds override, e.g. with physician-tuned weights. */
  criteria_config?: CriteriaConfig;
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const envelope = (await response.json()) as Envelope<T>;
    if (envelope.error) {
      throw new ApiError(
        envelope.error.code,
        envelope.error.message,
        envelope.error.details,
        response.status,
      );
    }
    return envelope.payload as T;
  }

  health(): Promise<HealthInfo> {
    return this.request("GET", "/health");
  }

  config(): Promise<ServerConfig> {
    return this.request("GET", "/config");
  }

  stats(): Promise<CasebaseStats> {
    return this.request("GET", "/casebase/stats");
  }

  openSession(body: OpenSessionRequest): Promise<SessionView> {
    return this.request("POST", "/sessions", body);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${encodeURIComponent(id)}`);
  }

  retrieve(id: string, k: number): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/retrieve`, { k });
  }

  assess(id: string, cells: PerformanceCell[]): Promise<SessionView> {
    return this.request("PUT", `/sessions/${encodeURIComponent(id)}/assessment`, { cells });
  }

  design(id: string, cHat?: number, dHat?: number): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/design`, {
      c_hat: cHat ?? null,
      d_hat: dHat ?? null,
    });
  }

  choose(id: string, action: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/choice`, { action });
  }

  review(id: string, verdict: ReviewVerdict, revisedAction?: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/review`, {
      verdict,
      revised_action: revisedAction ?? null,
    });
  }

  retain(id: string, diagnosis: 0 | 1): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(id)}/retain`, { diagnosis });
  }
}
