/**
 * Typed client for POST /v1/query. One function, two failure shapes:
 * ApiError for HTTP status failures (message comes from the server's
 * `detail`), NetworkError when the service is unreachable.
 */

import type { Pipeline, QueryRequest, QueryResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class NetworkError extends Error {
  constructor(message = "service unreachable") {
    super(message);
    this.name = "NetworkError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Flatten the service's `detail` field (string or field-error list). */
function detailToMessage(detail: unknown): string {
  if (typeof detail === "string") return detail;
  if (Array.isArray(detail)) {
    return detail
      .map((entry) =>
        entry && typeof entry === "object" && "field" in entry && "message" in entry
          ? `${(entry as { field: string }).field}: ${(entry as { message: string }).message}`
          : String(entry),
      )
      .join("; ");
  }
  return "unknown error";
}

export async function submitQuery(
  baseUrl: string,
  corpus: string,
  question: string,
  pipeline: Pipeline,
  options: { fetchImpl?: FetchLike; signal?: AbortSignal } = {},
): Promise<QueryResponse> {
  const fetchImpl = options.fetchImpl ?? fetch;
  const body: QueryRequest = { corpus_id: corpus, question, pipeline };
  let response: Response;
  try {
    response = await fetchImpl(`${baseUrl}/v1/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal: options.signal,
    });
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") throw err;
    throw new NetworkError(err instanceof Error ? err.message : String(err));
  }
  if (!response.ok) {
    let detail: unknown = null;
    try {
      detail = ((await response.json()) as { detail?: unknown }).detail;
    } catch {
      // non-JSON error body: fall through to the generic message
    }
    throw new ApiError(response.status, detailToMessage(detail));
  }
  return (await response.json()) as QueryResponse;
}
