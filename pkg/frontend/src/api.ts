// Thin typed client around the service's JSON API. The fetch implementation
// is injectable so tests can run against a scripted server.

import type {
  Candidate,
  DecisionResponse,
  Extraction,
  KbPage,
} from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public errorBody: { error: string; detail: string },
  ) {
    super(`${status}: ${errorBody.error}`);
  }
}

async function parse<T>(res: Response): Promise<T> {
  const body = await res.json();
  if (!res.ok) {
    throw new ApiRequestError(res.status, body);
  }
  return body as T;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async submitReport(
    content: string,
    format: "text" | "html" = "text",
  ): Promise<{ report_id: string; status: string }> {
    const res = await this.fetchImpl(`${this.base}/reports`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ content, format }),
    });
    return parse(res);
  }

  async extraction(reportId: string): Promise<Extraction> {
    const res = await this.fetchImpl(`${this.base}/reports/${reportId}/extraction`);
    return parse(res);
  }

  async pendingCandidates(): Promise<Candidate[]> {
    const res = await this.fetchImpl(`${this.base}/candidates?status=pending`);
    const body = await parse<{ candidates: Candidate[] }>(res);
    return body.candidates;
  }

  async decide(
    candidateId: string,
    decision: "accept" | "reject",
    typeOverride?: string,
  ): Promise<DecisionResponse> {
    const payload: Record<string, string> = { decision };
    if (typeOverride) payload.type = typeOverride;
    const res = await this.fetchImpl(`${this.base}/candidates/${candidateId}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    return parse(res);
  }

  async kbEntities(params: { type?: string; q?: string; page?: number; page_size?: number } = {}): Promise<KbPage> {
    const qs = new URLSearchParams();
    if (params.type) qs.set("type", params.type);
    if (params.q) qs.set("q", params.q);
    if (params.page) qs.set("page", String(params.page));
    if (params.page_size) qs.set("page_size", String(params.page_size));
    const suffix = qs.toString() ? `?${qs.toString()}` : "";
    const res = await this.fetchImpl(`${this.base}/kb/entities${suffix}`);
    return parse(res);
  }
}
