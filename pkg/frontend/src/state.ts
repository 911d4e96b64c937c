/**
 * Chat session state and its pure transitions.
 *
 * The view is a pure function of this state (see render.ts), so replaying
 * the same sequence of responses always reproduces the same DOM. At most
 * one query is in flight; submissions while waiting are rejected.
 */

import type { ChatTurn, PendingQuery } from "./types.js";

export interface AppState {
  history: ChatTurn[]; // ordered by time, oldest first
  inFlight: PendingQuery | null;
}

export function initialState(): AppState {
  return { history: [], inFlight: null };
}

/** Begin a query. Throws if one is already in flight (UI disables the form). */
export function startQuery(state: AppState, pending: PendingQuery): AppState {
  if (state.inFlight) {
    throw new Error("a query is already in flight");
  }
  return { history: state.history, inFlight: pending };
}

/** Append the resolved turn and clear the in-flight marker. */
export function resolveQuery(state: AppState, turn: ChatTurn): AppState {
  return { history: [...state.history, turn], inFlight: null };
}

/** Record a failure as an inline error turn; history is never dropped. */
export function failQuery(state: AppState, turn: ChatTurn): AppState {
  return resolveQuery(state, turn);
}

/** User cancelled: drop the in-flight marker, keep history untouched. */
export function cancelQuery(state: AppState): AppState {
  return { history: state.history, inFlight: null };
}
