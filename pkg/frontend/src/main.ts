/** DOM wiring for the workbench. All logic lives in state.ts / render.ts. */

import {
  aggregate,
  exportTsv,
  runQuery,
  status,
  ServiceError,
  type Mode,
  type QueryResponse,
} from "./api.js";
import {
  describeError,
  downloadName,
  frequencyLines,
  highlightSegments,
  pageInfo,
} from "./render.js";
import { initialState, reduce, toRequest, type Action, type FormState } from "./state.js";

const BASE = (window as unknown as { SERVICE_BASE?: string }).SERVICE_BASE ?? "";

let state: FormState = initialState;
let lastResponse: QueryResponse | null = null;

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

function dispatch(action: Action, rerun = true): void {
  state = reduce(state, action);
  if (rerun) void refresh();
}

async function refresh(): Promise<void> {
  if (state.query.trim() === "") return;
  const resultsEl = $("results");
  try {
    lastResponse = await runQuery(BASE, toRequest(state));
    renderResults(lastResponse);
    void refreshFrequencies();
  } catch (err) {
    lastResponse = null;
    resultsEl.replaceChildren(errorNode(err));
    $("sidebar").replaceChildren();
    $("paging").textContent = "";
  }
}

function errorNode(err: unknown): HTMLElement {
  const div = document.createElement("div");
  div.className = "error";
  if (err instanceof ServiceError) {
    const view = describeError(err.status, err.payload, state.query);
    const head = document.createElement("p");
    head.textContent = view.headline;
    div.append(head);
    if (view.before !== null) {
      const pre = document.createElement("pre");
      pre.append(view.before);
      const caret = document.createElement("span");
      caret.className = "caret";
      caret.textContent = "▸";
      pre.append(caret, view.after ?? "");
      div.append(pre);
    }
  } else {
    div.textContent = String(err);
  }
  return div;
}

function renderResults(resp: QueryResponse): void {
  const container = $("results");
  container.replaceChildren();
  for (const hit of resp.hits) {
    const card = document.createElement("article");
    card.className = "hit";
    const meta = document.createElement("header");
    meta.textContent = `${hit.doc_id} / ${hit.sent_id}`;
    card.append(meta);
    const sentence = document.createElement("p");
    for (const seg of highlightSegments(hit.sentence, hit.highlights)) {
      if (seg.name === null) {
        sentence.append(seg.text);
      } else {
        const mark = document.createElement("mark");
        mark.textContent = seg.text;
        mark.title = seg.name;
        sentence.append(mark);
      }
    }
    card.append(sentence);
    container.append(card);
  }
  const info = pageInfo(resp.total, state.pageSize, state.offset);
  $("paging").textContent =
    resp.total === 0
      ? "no matches"
      : `${info.from}–${info.to} of ${resp.total} (page ${info.page}/${info.pages})`;
  ($("prev") as HTMLButtonElement).disabled = !info.hasPrev;
  ($("next") as HTMLButtonElement).disabled = !info.hasNext;
  const notes: string[] = [];
  if (resp.truncated) notes.push("some capture combinations were truncated");
  if (resp.full_scan) notes.push("query had no selective constraint (full scan)");
  $("notes").textContent = notes.join("; ");
}

async function refreshFrequencies(): Promise<void> {
  const sidebar = $("sidebar");
  if (state.capture.trim() === "") {
    sidebar.replaceChildren();
    return;
  }
  try {
    const resp = await aggregate(BASE, {
      ...toRequest(state),
      capture: state.capture.trim(),
    });
    sidebar.replaceChildren();
    const head = document.createElement("h2");
    head.textContent = `${resp.capture} (${resp.total} bound)`;
    sidebar.append(head);
    for (const line of frequencyLines(resp.rows)) {
      const row = document.createElement("div");
      row.className = "freq";
      const bar = document.createElement("span");
      bar.className = "bar";
      bar.style.width = `${Math.round(line.share * 100)}%`;
      const label = document.createElement("span");
      label.textContent = `${line.display} (${line.count})`;
      row.append(bar, label);
      sidebar.append(row);
    }
  } catch (err) {
    sidebar.replaceChildren(errorNode(err));
  }
}

async function download(): Promise<void> {
  try {
    const blob = await exportTsv(BASE, { ...toRequest(state) });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = downloadName(state.query);
    a.click();
    URL.revokeObjectURL(url);
  } catch (err) {
    $("results").replaceChildren(errorNode(err));
  }
}

async function showStatus(): Promise<void> {
  try {
    const s = await status(BASE);
    $("status").textContent = s.loading
      ? "index loading…"
      : `index ${s.index_version ?? "?"} · ${s.sentences} sentences · ${s.documents} documents`;
  } catch {
    $("status").textContent = "service unreachable";
  }
}

export function boot(): void {
  const form = $("query-form") as HTMLFormElement;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    dispatch({ kind: "set-query", query: ($("query") as HTMLInputElement).value });
  });
  ($("mode") as HTMLSelectElement).addEventListener("change", (ev) => {
    dispatch(
      { kind: "set-mode", mode: (ev.target as HTMLSelectElement).value as Mode },
      false,
    );
  });
  ($("context") as HTMLInputElement).addEventListener("change", (ev) => {
    dispatch(
      { kind: "set-context", context: (ev.target as HTMLInputElement).value },
      false,
    );
  });
  ($("capture") as HTMLInputElement).addEventListener("change", (ev) => {
    dispatch(
      { kind: "set-capture", capture: (ev.target as HTMLInputElement).value },
      false,
    );
    void refreshFrequencies();
  });
  ($("prev") as HTMLButtonElement).addEventListener("click", () =>
    dispatch({ kind: "prev-page" }),
  );
  ($("next") as HTMLButtonElement).addEventListener("click", () =>
    dispatch({ kind: "next-page", total: lastResponse?.total ?? 0 }),
  );
  ($("export") as HTMLButtonElement).addEventListener("click", () => void download());
  void showStatus();
}

if (typeof document !== "undefined" && document.getElementById("query-form")) {
  boot();
}
