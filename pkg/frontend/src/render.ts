/** Pure presentation helpers: no DOM, no fetch. */

import type { AggregateRow, ErrorPayload, Highlight } from "./api.js";

export interface Segment {
  text: string;
  /** Capture name when the segment is inside a highlight, else null. */
  name: string | null;
}

/**
 * Split a sentence into plain and highlighted segments.
 *
 * The service's character offsets are used verbatim; the sentence is never
 * re-tokenized. Highlights are taken in (char_start, char_end, name) order
 * and a highlight overlapping an earlier one is dropped, so segments always
 * tile the sentence exactly.
 */
export function highlightSegments(
  sentence: string,
  highlights: readonly Highlight[],
): Segment[] {
  const ordered = [...highlights].sort(
    (a, b) =>
      a.char_start - b.char_start ||
      a.char_end - b.char_end ||
      (a.name < b.name ? -1 : a.name > b.name ? 1 : 0),
  );
  const segments: Segment[] = [];
  let cursor = 0;
  for (const h of ordered) {
    if (h.char_start < cursor) continue;
    if (h.char_start > cursor) {
      segments.push({ text: sentence.slice(cursor, h.char_start), name: null });
    }
    segments.push({
      text: sentence.slice(h.char_start, h.char_end),
      name: h.name,
    });
    cursor = h.char_end;
  }
  if (cursor < sentence.length) {
    segments.push({ text: sentence.slice(cursor), name: null });
  }
  return segments;
}

export interface PageInfo {
  page: number;
  pages: number;
  from: number;
  to: number;
  hasPrev: boolean;
  hasNext: boolean;
}

/** 1-based paging arithmetic for a result window. */
export function pageInfo(total: number, limit: number, offset: number): PageInfo {
  const pages = Math.max(1, Math.ceil(total / limit));
  const page = Math.floor(offset / limit) + 1;
  const from = total === 0 ? 0 : offset + 1;
  const to = Math.min(total, offset + limit);
  return {
    page,
    pages,
    from,
    to,
    hasPrev: offset > 0,
    hasNext: offset + limit < total,
  };
}

export interface FrequencyLine {
  display: string;
  count: number;
  /** Fraction of the largest count, in [0, 1]; drives the bar width. */
  share: number;
}

/** Frequency rows scaled against the top count for bar rendering. */
export function frequencyLines(rows: readonly AggregateRow[]): FrequencyLine[] {
  const top = rows.length > 0 ? rows[0].count : 0;
  return rows.map((r) => ({
    display: r.display,
    count: r.count,
    share: top === 0 ? 0 : r.count / top,
  }));
}

export interface ErrorView {
  headline: string;
  /** Query text split around the error position, when the service gave one. */
  before: string | null;
  after: string | null;
}

/**
 * Present a service error. Syntax errors (HTTP 400) carry a character
 * offset into the query, which is echoed as a split point so the UI can
 * point at the offending spot.
 */
export function describeError(
  status: number,
  payload: ErrorPayload,
  query: string,
): ErrorView {
  if (status === 400 && typeof payload.offset === "number") {
    const at = Math.min(payload.offset, query.length);
    const code = payload.code ? ` [${payload.code}]` : "";
    return {
      headline: `syntax error at position ${payload.offset}${code}: ${payload.message}`,
      before: query.slice(0, at),
      after: query.slice(at),
    };
  }
  const kind =
    status === 422 ? "query error" : status === 503 ? "service unavailable" : "error";
  return { headline: `${kind}: ${payload.message}`, before: null, after: null };
}

/** File name for a TSV download, derived from the query text. */
export function downloadName(query: string): string {
  const slug = query
    .toLowerCase()
    .replace(/[^a-z0-9]+/g, "-")
    .replace(/^-+|-+$/g, "")
    .slice(0, 40);
  return (slug === "" ? "results" : slug) + ".tsv";
}
