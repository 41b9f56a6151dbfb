/** Typed client for the search service HTTP endpoints. */

export type Mode = "boolean" | "sequential" | "syntactic";

export interface Span {
  token_start: number;
  token_end: number;
  char_start: number;
  char_end: number;
  text: string;
}

export interface Highlight {
  name: string;
  char_start: number;
  char_end: number;
}

export interface Hit {
  doc_id: string;
  sent_id: string;
  ordinal: number;
  sentence: string;
  captures: Record<string, Span>;
  highlights: Highlight[];
  doc?: { title: string; year: number | null; venue: string };
  paragraph?: string;
}

export interface QueryResponse {
  index_version: string;
  total: number;
  total_is_exact: boolean;
  limit: number;
  offset: number;
  truncated: boolean;
  full_scan: boolean;
  hits: Hit[];
}

export interface AggregateRow {
  key: string;
  display: string;
  count: number;
}

export interface AggregateResponse {
  index_version: string;
  capture: string;
  rows: AggregateRow[];
  excluded: number;
  total: number;
}

export interface StatusResponse {
  index_version: string | null;
  loading: boolean;
  sentences: number;
  documents: number;
  jobs: Record<string, { state: string; type_name: string }>;
}

/** Error envelope: 400 carries offset/code, 422 and 503 only a message. */
export interface ErrorPayload {
  message: string;
  offset?: number;
  code?: string;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ErrorPayload,
  ) {
    super(payload.message);
  }
}

export interface QueryRequest {
  mode: Mode;
  query: string;
  context?: string;
  limit?: number;
  offset?: number;
  expand_context?: boolean;
}

async function post<T>(base: string, path: string, body: unknown): Promise<T> {
  const resp = await fetch(base + path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!resp.ok) {
    let payload: ErrorPayload;
    try {
      payload = (await resp.json()) as ErrorPayload;
    } catch {
      payload = { message: resp.statusText };
    }
    throw new ServiceError(resp.status, payload);
  }
  return (await resp.json()) as T;
}

export function runQuery(base: string, req: QueryRequest): Promise<QueryResponse> {
  return post(base, "/query", req);
}

export function aggregate(
  base: string,
  req: QueryRequest & { capture: string },
): Promise<AggregateResponse> {
  return post(base, "/aggregate", req);
}

/** Raw TSV bytes from /export, byte-identical to what the service streams. */
export async function exportTsv(base: string, req: QueryRequest): Promise<Blob> {
  const resp = await fetch(base + "/export", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(req),
  });
  if (!resp.ok) {
    let payload: ErrorPayload;
    try {
      payload = (await resp.json()) as ErrorPayload;
    } catch {
      payload = { message: resp.statusText };
    }
    throw new ServiceError(resp.status, payload);
  }
  return resp.blob();
}

export async function status(base: string): Promise<StatusResponse> {
  const resp = await fetch(base + "/admin/status");
  if (!resp.ok) {
    throw new ServiceError(resp.status, { message: resp.statusText });
  }
  return (await resp.json()) as StatusResponse;
}
