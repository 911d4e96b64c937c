/**
 * Pure DOM builders: state in, elements out.
 *
 * Nothing here computes scores, verdicts, or ordering — the server already
 * decided all of that; these functions only lay out what arrived on the
 * wire. Given the same turns they always produce the same DOM.
 */

import type { Strings } from "./i18n.js";
import type {
  ChatTurn,
  CompareTurn,
  ErrorTurn,
  QueryResponse,
  SingleTurn,
  TraceEntry,
  WireChunk,
  WireVerdict,
} from "./types.js";
import type { AppState } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function verdictBadge(verdict: WireVerdict, t: Strings): HTMLSpanElement {
  const labels: Record<string, string> = {
    relevant: t.verdictRelevant,
    irrelevant: t.verdictIrrelevant,
    fail_open: t.verdictFailOpen,
  };
  const kind = verdict ?? "none";
  return el("span", `badge badge-${kind}`, verdict ? labels[verdict] : t.verdictNone);
}

/**
 * One row per retrieve/check round: round number, the query actually used,
 * the verdict badge, the refined query when present, and how many chunks
 * came back. Renders defensively: a missing or empty trace becomes a note,
 * never an exception.
 */
export function renderTrace(
  trace: TraceEntry[] | undefined,
  exhausted: boolean,
  t: Strings,
): HTMLElement {
  const section = el("section", "trace");
  section.appendChild(el("h4", "trace-heading", t.traceHeading));
  if (!trace || trace.length === 0) {
    section.appendChild(el("p", "trace-empty", t.emptyTrace));
    return section;
  }
  const list = el("ol", "trace-rows");
  for (const entry of trace) {
    const row = el("li", "trace-row");
    row.appendChild(el("span", "trace-iteration", `#${entry.iteration}`));
    row.appendChild(el("span", "trace-query", entry.query_used ?? ""));
    row.appendChild(verdictBadge(entry.verdict ?? null, t));
    if (entry.refined_query) {
      row.appendChild(el("span", "trace-refined", `${t.refinedTo}: ${entry.refined_query}`));
    }
    row.appendChild(
      el("span", "trace-chunks", `${entry.chunk_count ?? 0} ${t.chunksRetrieved}`),
    );
    list.appendChild(row);
  }
  section.appendChild(list);
  if (exhausted) {
    section.appendChild(el("div", "exhausted-banner", t.exhaustedBanner));
  }
  return section;
}

export function renderChunks(chunks: WireChunk[], t: Strings): HTMLElement {
  const panel = el("section", "chunks");
  panel.appendChild(el("h4", "chunks-heading", t.chunksHeading));
  for (const chunk of chunks) {
    const card = el("article", "chunk-card");
    const head = el("header", "chunk-head");
    head.appendChild(el("span", "chunk-id", chunk.chunk_id));
    head.appendChild(el("span", "chunk-doc", chunk.doc_id));
    head.appendChild(
      el("span", "chunk-score", `${t.scoreLabel} ${chunk.score.toFixed(4)}`),
    );
    card.appendChild(head);
    card.appendChild(el("p", "chunk-text", chunk.text));
    panel.appendChild(card);
  }
  return panel;
}

export function renderAnswerCard(
  label: string,
  response: QueryResponse,
  t: Strings,
): HTMLElement {
  const card = el("article", "answer-card");
  card.appendChild(el("h3", "answer-pipeline", label));
  card.appendChild(el("p", "answer-text", response.answer));
  card.appendChild(renderChunks(response.chunks, t));
  card.appendChild(renderTrace(response.trace, response.refinement_exhausted, t));
  return card;
}

function pipelineLabel(pipeline: "vanilla" | "advanced", t: Strings): string {
  return pipeline === "vanilla" ? t.pipelineVanilla : t.pipelineAdvanced;
}

function renderSingleTurn(turn: SingleTurn, t: Strings): HTMLElement {
  const wrap = el("div", "turn turn-single");
  wrap.appendChild(el("p", "question-bubble", turn.question));
  wrap.appendChild(renderAnswerCard(pipelineLabel(turn.pipeline, t), turn.response, t));
  return wrap;
}

/** Fig-1-style layout: the two pipelines' cards side by side. */
function renderCompareTurn(turn: CompareTurn, t: Strings): HTMLElement {
  const wrap = el("div", "turn turn-compare");
  wrap.appendChild(el("p", "question-bubble", turn.question));
  const row = el("div", "compare-row");
  row.appendChild(renderAnswerCard(t.pipelineVanilla, turn.vanilla, t));
  row.appendChild(renderAnswerCard(t.pipelineAdvanced, turn.advanced, t));
  wrap.appendChild(row);
  return wrap;
}

function renderErrorTurn(turn: ErrorTurn, t: Strings): HTMLElement {
  const wrap = el("div", "turn turn-error");
  wrap.appendChild(el("p", "question-bubble", turn.question));
  const card = el("div", "error-card");
  card.appendChild(el("p", "error-text", `${t.errorPrefix}: ${turn.message}`));
  if (turn.retryable) {
    const button = el("button", "retry-button", t.retry);
    button.type = "button";
    button.dataset.question = turn.question;
    button.dataset.pipeline = turn.pipeline;
    button.dataset.compare = String(turn.compare);
    card.appendChild(button);
  }
  wrap.appendChild(card);
  return wrap;
}

export function renderTurn(turn: ChatTurn, t: Strings): HTMLElement {
  switch (turn.kind) {
    case "single":
      return renderSingleTurn(turn, t);
    case "compare":
      return renderCompareTurn(turn, t);
    case "error":
      return renderErrorTurn(turn, t);
  }
}

/** The whole chat thread plus the waiting indicator: view = f(state). */
export function renderThread(state: AppState, t: Strings): HTMLElement {
  const thread = el("div", "thread");
  for (const turn of state.history) {
    thread.appendChild(renderTurn(turn, t));
  }
  if (state.inFlight) {
    const pending = el("div", "turn turn-pending");
    pending.appendChild(el("p", "question-bubble", state.inFlight.question));
    pending.appendChild(el("p", "pending-note", t.waiting));
    thread.appendChild(pending);
  }
  return thread;
}
