/**
 * Thin typed client over the documented HTTP API. The fetch implementation
 * is injectable so tests run without a server.
 */

import {
  Health,
  HealthSchema,
  Problem,
  ProblemSchema,
  Trace,
  TraceSchema,
  Turn,
  TurnList,
  TurnListSchema,
  TurnSchema,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly problem: Problem | null,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function readProblem(response: Response): Promise<ApiError> {
  let problem: Problem | null = null;
  try {
    problem = ProblemSchema.parse(await response.json());
  } catch {
    problem = null;
  }
  const detail = problem ? `${problem.stage}: ${problem.detail}` : response.statusText;
  return new ApiError(response.status, problem, `HTTP ${response.status} — ${detail}`);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string, parse: (data: unknown) => T): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) throw await readProblem(response);
    return parse(await response.json());
  }

  async postChat(question: string, session = "default", route?: string): Promise<Turn> {
    const body: Record<string, string> = { question, session };
    if (route !== undefined) body.route = route;
    const response = await this.fetchImpl(this.baseUrl + "/chat", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await readProblem(response);
    return TurnSchema.parse(await response.json());
  }

  getTrace(turnId: string): Promise<Trace> {
    return this.getJson(`/trace/${encodeURIComponent(turnId)}`, (d) =>
      TraceSchema.parse(d),
    );
  }

  getTurns(session = "default"): Promise<TurnList> {
    return this.getJson(`/turns?session=${encodeURIComponent(session)}`, (d) =>
      TurnListSchema.parse(d),
    );
  }

  getHealth(): Promise<Health> {
    return this.getJson("/health", (d) => HealthSchema.parse(d));
  }

  /** URL of a rendered SVG attachment, suitable for an <img> src. */
  plotUrl(turnId: string, attachmentId: string): string {
    return (
      this.baseUrl +
      `/plot/${encodeURIComponent(turnId)}/${encodeURIComponent(attachmentId)}`
    );
  }
}
