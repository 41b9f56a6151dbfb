/** Workbench state and its pure reducer. */

import type { Mode, QueryRequest } from "./api.js";

export interface FormState {
  mode: Mode;
  query: string;
  context: string;
  capture: string;
  pageSize: number;
  offset: number;
}

export const initialState: FormState = {
  mode: "boolean",
  query: "",
  context: "",
  capture: "",
  pageSize: 25,
  offset: 0,
};

export type Action =
  | { kind: "set-mode"; mode: Mode }
  | { kind: "set-query"; query: string }
  | { kind: "set-context"; context: string }
  | { kind: "set-capture"; capture: string }
  | { kind: "set-page-size"; pageSize: number }
  | { kind: "next-page"; total: number }
  | { kind: "prev-page" }
  | { kind: "first-page" };

/**
 * Pure transition function. Anything that changes which matches come back
 * (mode, query text, context, page size) resets pagination to the start,
 * so a stale offset can never point past the new result set.
 */
export function reduce(state: FormState, action: Action): FormState {
  switch (action.kind) {
    case "set-mode":
      return { ...state, mode: action.mode, offset: 0 };
    case "set-query":
      return { ...state, query: action.query, offset: 0 };
    case "set-context":
      return { ...state, context: action.context, offset: 0 };
    case "set-capture":
      return { ...state, capture: action.capture };
    case "set-page-size":
      return { ...state, pageSize: Math.max(1, action.pageSize), offset: 0 };
    case "next-page": {
      const next = state.offset + state.pageSize;
      return next >= action.total ? state : { ...state, offset: next };
    }
    case "prev-page":
      return { ...state, offset: Math.max(0, state.offset - state.pageSize) };
    case "first-page":
      return { ...state, offset: 0 };
  }
}

/** Request body for /query and /export; context only when non-blank. */
export function toRequest(state: FormState): QueryRequest {
  const req: QueryRequest = {
    mode: state.mode,
    query: state.query,
    limit: state.pageSize,
    offset: state.offset,
  };
  if (state.context.trim() !== "") {
    req.context = state.context;
  }
  return req;
}
