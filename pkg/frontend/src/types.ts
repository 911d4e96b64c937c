/**
 * Wire types mirroring the query service's JSON schema, plus the UI's own
 * chat-turn model. The UI never recomputes scores or verdicts; these types
 * exist purely to display what the server sent.
 */

export type Pipeline = "vanilla" | "advanced";

/** Verdict as serialized by the service; null on unchecked (vanilla) rounds. */
export type WireVerdict = "relevant" | "irrelevant" | "fail_open" | null;

export interface WireChunk {
  chunk_id: string;
  doc_id: string;
  text: string;
  score: number;
}

export interface TraceEntry {
  iteration: number;
  query_used: string;
  verdict: WireVerdict;
  refined_query: string | null;
  chunk_count: number;
}

export interface QueryResponse {
  answer: string;
  chunks: WireChunk[];
  trace: TraceEntry[];
  refinement_exhausted: boolean;
  timings_ms: Record<string, number>;
}

export interface QueryRequest {
  corpus_id: string;
  question: string;
  pipeline: Pipeline;
  overrides?: Record<string, unknown>;
}

/** One resolved exchange in the chat history. */
export interface SingleTurn {
  kind: "single";
  question: string;
  pipeline: Pipeline;
  response: QueryResponse;
  timestamp: number;
}

/** Compare mode: the same question answered by both pipelines. */
export interface CompareTurn {
  kind: "compare";
  question: string;
  vanilla: QueryResponse;
  advanced: QueryResponse;
  timestamp: number;
}

/** A failed exchange, kept in history so errors render inline. */
export interface ErrorTurn {
  kind: "error";
  question: string;
  pipeline: Pipeline;
  compare: boolean;
  message: string;
  retryable: boolean; // network failures get a retry affordance, 4xx do not
  timestamp: number;
}

export type ChatTurn = SingleTurn | CompareTurn | ErrorTurn;

/** The query currently on the wire; at most one per session. */
export interface PendingQuery {
  question: string;
  pipeline: Pipeline;
  compare: boolean;
}
