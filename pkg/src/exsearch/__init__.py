"""Extractive search over linguistically annotated corpora.

Three query modes (boolean, sequential, syntactic-by-example) with named
captures, linguistic expansion, contextual restrictions, indexed retrieval,
TSV export, and capture-frequency aggregation.
"""

from .corpus import (
    AnnotatedSentence, Corpus, DocumentMeta, Token, apply_entity_lexicon,
    load_corpus, save_corpus,
)
from .errors import (
    CorpusError, ExsearchError, IndexFormatError, QueryError, SemanticError,
)
from .index import build_index, load_index, save_index
from .match import (
    EvalStats, Match, Span, eval_boolean, eval_sequential, eval_syntactic,
    evaluate, expand_capture,
)
from .oracle import oracle_eval
from .parser import parse_boolean, parse_context, parse_sequential, render
from .qbe import (
    CommandParseProvider, FixtureParseProvider, compile_query,
    infer_restriction, parse_markup, render_markup,
)
from .results import aggregate_by_capture, to_tsv
from .service import Engine, create_app

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence", "Corpus", "DocumentMeta", "Token",
    "apply_entity_lexicon", "load_corpus", "save_corpus",
    "CorpusError", "ExsearchError", "IndexFormatError", "QueryError",
    "SemanticError",
    "build_index", "load_index", "save_index",
    "EvalStats", "Match", "Span", "eval_boolean", "eval_sequential",
    "eval_syntactic", "evaluate", "expand_capture", "oracle_eval",
    "parse_boolean", "parse_context", "parse_sequential", "render",
    "CommandParseProvider", "FixtureParseProvider", "compile_query",
    "infer_restriction", "parse_markup", "render_markup",
    "aggregate_by_capture", "to_tsv", "Engine", "create_app",
]
