"""Query engine facade and HTTP service.

The engine owns an immutable index snapshot; rebuilds (lexicon re-tagging)
happen on a background thread and swap the snapshot atomically, so reads
are never blocked and every response carries the index version it was
answered from.
"""

import itertools
import threading
from dataclasses import replace

from .corpus import Corpus, apply_entity_lexicon
from .errors import QueryError, SemanticError
from .index import Index, build_index
from .match import (
    DEFAULT_CAP, DEFAULT_EXPANSION_BLOCKLIST, EvalStats, evaluate,
)
from .parser import parse_boolean, parse_context, parse_sequential
from .qbe import compile_query, parse_markup
from .queryast import capture_names

MODES = ("boolean", "sequential", "syntactic")


class Engine:
    def __init__(self, index: Index | None, parse_provider=None,
                 cap=DEFAULT_CAP, blocklist=DEFAULT_EXPANSION_BLOCKLIST):
        self.index = index
        self.parse_provider = parse_provider
        self.cap = cap
        self.blocklist = frozenset(blocklist)
        self._rebuild_lock = threading.Lock()
        self._jobs = {}
        self._job_counter = itertools.count(1)

    # -- query compilation ----------------------------------------------

    def compile(self, mode: str, text: str, context: str | None = None):
        if mode not in MODES:
            raise SemanticError("unknown query mode %r" % mode)
        if mode == "boolean":
            query = parse_boolean(text)
        elif mode == "sequential":
            query = parse_sequential(text)
        else:
            marked = parse_markup(text)
            if self.parse_provider is None:
                raise SemanticError(
                    "no parse provider configured for syntactic queries")
            query = compile_query(marked, self.parse_provider)
        if context is not None and context.strip():
            if query.context is not None:
                raise QueryError(0, "duplicate-context",
                                 "context given both inline (#d) and "
                                 "separately")
            query = replace(query, context=parse_context(context))
        return query

    def run(self, mode, text, context=None, stats=None):
        query = self.compile(mode, text, context)
        if stats is None:
            stats = EvalStats()
        matches = evaluate(self.index, query, cap=self.cap, stats=stats,
                           blocklist=self.blocklist)
        return query, stats, matches

    # -- corpus administration ------------------------------------------

    def corpus(self) -> Corpus:
        return Corpus(sentences=self.index.sentences(),
                      documents=self.index.documents())

    def retag(self, lexicon, type_name):
        """Apply a lexicon as a new entity type and rebuild synchronously."""
        with self._rebuild_lock:
            corpus = apply_entity_lexicon(self.corpus(), lexicon, type_name)
            new_index = build_index(corpus)
            self.index = new_index  # atomic snapshot swap
        return new_index.version

    def submit_retag(self, lexicon, type_name):
        job_id = next(self._job_counter)
        self._jobs[job_id] = {"state": "running", "type_name": type_name}

        def work():
            try:
                version = self.retag(lexicon, type_name)
                self._jobs[job_id] = {"state": "done", "type_name": type_name,
                                      "index_version": version}
            except Exception as exc:
                self._jobs[job_id] = {"state": "failed",
                                      "type_name": type_name,
                                      "error": str(exc)}

        threading.Thread(target=work, daemon=True).start()
        return job_id

    def jobs(self):
        return dict(self._jobs)


# ---------------------------------------------------------------------------
# HTTP facade


def span_payload(span):
    return {"token_start": span.token_start, "token_end": span.token_end,
            "char_start": span.char_start, "char_end": span.char_end,
            "text": span.text}


def create_app(engine: Engine):
    from fastapi import FastAPI
    from fastapi.responses import JSONResponse, StreamingResponse
    from pydantic import BaseModel, Field

    class QueryRequest(BaseModel):
        mode: str
        query: str
        context: str | None = None
        limit: int = Field(default=50, ge=1, le=1000)
        offset: int = Field(default=0, ge=0)
        expand_context: bool = False

    class AggregateRequest(QueryRequest):
        capture: str

    class LexiconRequest(BaseModel):
        lexicon: list[str]
        type_name: str

    app = FastAPI(title="extractive search service")

    @app.exception_handler(QueryError)
    async def _query_error(_request, exc):
        return JSONResponse(status_code=400, content={
            "offset": exc.offset, "code": exc.code, "message": exc.message})

    @app.exception_handler(SemanticError)
    async def _semantic_error(_request, exc):
        return JSONResponse(status_code=422, content={"message": str(exc)})

    def ready():
        return engine.index is not None

    @app.post("/query")
    def query(req: QueryRequest):
        if not ready():
            return JSONResponse(status_code=503,
                                content={"message": "index loading"})
        index = engine.index
        stats = EvalStats()
        _q, stats, matches = engine.run(req.mode, req.query, req.context,
                                        stats)
        hits = []
        total = 0
        for match in matches:
            if req.offset <= total < req.offset + req.limit:
                sent = index.sentence(match.ordinal)
                hit = {
                    "doc_id": match.doc_id,
                    "sent_id": match.sent_id,
                    "ordinal": match.ordinal,
                    "sentence": sent.text,
                    "captures": {name: span_payload(span)
                                 for name, span in match.captures.items()},
                    "highlights": [
                        {"name": name, "char_start": span.char_start,
                         "char_end": span.char_end}
                        for name, span in sorted(match.captures.items())],
                }
                if req.expand_context:
                    doc = index.document(match.doc_id)
                    hit["doc"] = {"title": doc.title, "year": doc.year,
                                  "venue": doc.venue}
                    hit["paragraph"] = doc.paragraphs.get(
                        sent.paragraph_id, "")
                hits.append(hit)
            total += 1
        return {"index_version": index.version, "total": total,
                "total_is_exact": True, "limit": req.limit,
                "offset": req.offset, "truncated": stats.truncated,
                "full_scan": stats.full_scan, "hits": hits}

    @app.post("/export")
    def export(req: QueryRequest):
        if not ready():
            return JSONResponse(status_code=503,
                                content={"message": "index loading"})
        index = engine.index
        query_obj, stats, matches = engine.run(req.mode, req.query,
                                               req.context)
        names = sorted(capture_names(query_obj))
        from .results import escape_field, tsv_header

        def rows():
            yield "\t".join(tsv_header(names)) + "\n"
            for match in matches:
                sent = index.sentence(match.ordinal)
                row = [escape_field(match.doc_id),
                       escape_field(match.sent_id),
                       escape_field(sent.text)]
                for name in names:
                    span = match.captures.get(name)
                    if span is None:
                        row.extend([""] * 6)
                    else:
                        row.extend([escape_field(name),
                                    escape_field(span.text),
                                    str(span.token_start),
                                    str(span.token_end),
                                    str(span.char_start),
                                    str(span.char_end)])
                yield "\t".join(row) + "\n"

        return StreamingResponse(
            rows(), media_type="text/tab-separated-values; charset=utf-8",
            headers={"X-Index-Version": index.version,
                     "Content-Disposition":
                         'attachment; filename="results.tsv"'})

    @app.post("/aggregate")
    def aggregate(req: AggregateRequest):
        if not ready():
            return JSONResponse(status_code=503,
                                content={"message": "index loading"})
        from .results import aggregate_by_capture
        index = engine.index
        query_obj, _stats, matches = engine.run(req.mode, req.query,
                                                req.context)
        if req.capture not in capture_names(query_obj):
            raise SemanticError("query has no capture named %r" % req.capture)
        table = aggregate_by_capture(matches, req.capture)
        return {"index_version": index.version, "capture": table.capture,
                "rows": [{"key": k, "display": d, "count": c}
                         for k, d, c in table.rows],
                "excluded": table.excluded, "total": table.total}

    @app.post("/admin/lexicon")
    def admin_lexicon(req: LexiconRequest):
        if not ready():
            return JSONResponse(status_code=503,
                                content={"message": "index loading"})
        if not req.lexicon:
            raise SemanticError("empty lexicon")
        if not req.type_name:
            raise SemanticError("empty entity type name")
        job_id = engine.submit_retag(req.lexicon, req.type_name)
        return {"job_id": job_id}

    @app.get("/admin/status")
    def admin_status():
        index = engine.index
        return {
            "index_version": index.version if index else None,
            "loading": index is None,
            "sentences": len(index) if index else 0,
            "documents": len(index.documents()) if index else 0,
            "jobs": {str(k): v for k, v in engine.jobs().items()},
        }

    return app
