"""Command-line entry points.

Exit codes: 0 success, 1 query error, 2 I/O or configuration error.
Data goes to stdout, diagnostics to stderr.
"""

import argparse
import sys

from .corpus import apply_entity_lexicon, load_corpus, save_corpus
from .errors import CorpusError, ExsearchError, IndexFormatError, QueryError, \
    SemanticError
from .index import build_index, load_index, save_index
from .match import DEFAULT_CAP, EvalStats
from .qbe import CommandParseProvider, FixtureParseProvider
from .queryast import capture_names
from .results import (
    aggregate_by_capture, frequency_table_to_tsv, plot_frequency_table,
    to_tsv,
)
from .service import Engine


def _err(message):
    print("error: %s" % message, file=sys.stderr)


def _read_query(args):
    if args.query_file:
        try:
            with open(args.query_file, encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise IndexFormatError("cannot read query file: %s" % exc)
    if not args.query:
        raise QueryError(0, "empty-query", "no query given")
    return args.query


def _make_engine(args):
    index = load_index(args.index)
    provider = None
    if getattr(args, "parse_fixtures", None):
        provider = FixtureParseProvider.from_file(args.parse_fixtures)
    elif getattr(args, "parse_command", None):
        provider = CommandParseProvider(args.parse_command)
    cap = getattr(args, "cap", DEFAULT_CAP)
    return Engine(index, parse_provider=provider, cap=cap)


def cmd_validate(args):
    corpus = load_corpus(args.corpus)
    print("ok: %d sentences, %d documents"
          % (len(corpus.sentences), len(corpus.documents)))
    return 0


def cmd_index(args):
    corpus = load_corpus(args.corpus)
    index = build_index(corpus)
    save_index(index, args.out)
    print("indexed %d sentences, %d documents -> %s (version %s)"
          % (len(index), len(index.documents()), args.out, index.version),
          file=sys.stderr)
    return 0


def _highlight(sent_text, captures):
    """Bracket capture spans inside the sentence text."""
    spans = sorted(((s.char_start, s.char_end, name)
                    for name, s in captures.items()))
    out = []
    cursor = 0
    for cs, ce, name in spans:
        if cs < cursor:
            continue  # overlapping spans: show the first
        out.append(sent_text[cursor:cs])
        out.append("[%s=%s]" % (name, sent_text[cs:ce]))
        cursor = ce
    out.append(sent_text[cursor:])
    return "".join(out)


def cmd_query(args):
    engine = _make_engine(args)
    stats = EvalStats()
    _query, stats, matches = engine.run(args.mode, _read_query(args),
                                        args.context, stats)
    shown = 0
    for match in matches:
        if args.limit and shown >= args.limit:
            break
        sent = engine.index.sentence(match.ordinal)
        print("%s\t%s\t%s" % (match.doc_id, match.sent_id,
                              _highlight(sent.text, match.captures)))
        shown += 1
    if stats.truncated:
        print("warning: capture products truncated in %d sentence(s)"
              % len(stats.truncated_sentences), file=sys.stderr)
    if stats.full_scan:
        print("warning: query has no selective constraints; full scan",
              file=sys.stderr)
    return 0


def cmd_export(args):
    engine = _make_engine(args)
    query, _stats, matches = engine.run(args.mode, _read_query(args),
                                        args.context)
    names = capture_names(query)
    index = engine.index

    def write(sink):
        return to_tsv(matches, sink, names,
                      lambda ordinal: index.sentence(ordinal).text)

    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            count = write(fh)
    else:
        count = write(sys.stdout)
    print("exported %d rows" % count, file=sys.stderr)
    return 0


def cmd_aggregate(args):
    engine = _make_engine(args)
    query, _stats, matches = engine.run(args.mode, _read_query(args),
                                        args.context)
    if args.capture not in capture_names(query):
        raise SemanticError("query has no capture named %r" % args.capture)
    table = aggregate_by_capture(matches, args.capture)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            frequency_table_to_tsv(table, fh)
    else:
        frequency_table_to_tsv(table, sys.stdout)
    if args.plot:
        plot_frequency_table(table, args.plot, top=args.plot_top)
        print("wrote figure %s" % args.plot, file=sys.stderr)
    if table.excluded:
        print("note: %d match(es) lacked capture %r"
              % (table.excluded, args.capture), file=sys.stderr)
    return 0


def cmd_tag(args):
    corpus = load_corpus(args.corpus)
    try:
        with open(args.lexicon, encoding="utf-8") as fh:
            lexicon = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise IndexFormatError("cannot read lexicon: %s" % exc)
    tagged = apply_entity_lexicon(corpus, lexicon, args.type)
    if args.out:
        save_corpus(tagged, args.out)
        print("wrote tagged corpus %s" % args.out, file=sys.stderr)
    if args.index_out:
        index = build_index(tagged)
        save_index(index, args.index_out)
        print("rebuilt index %s (version %s)" % (args.index_out,
                                                 index.version),
              file=sys.stderr)
    if not args.out and not args.index_out:
        raise IndexFormatError("tag: need --out and/or --index-out")
    return 0


def cmd_serve(args):
    import uvicorn
    from .service import create_app
    engine = _make_engine(args)
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_arg_parser():
    parser = argparse.ArgumentParser(
        prog="exsearch",
        description="extractive search over annotated corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a corpus file")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("index", help="build and save an index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    def query_args(p, with_mode=True):
        p.add_argument("--index", required=True)
        if with_mode:
            p.add_argument("--mode", required=True,
                           choices=("boolean", "sequential", "syntactic"))
        p.add_argument("query", nargs="?", default=None)
        p.add_argument("--query-file",
                       help="read the query from a file instead of argv")
        p.add_argument("--context", help="contextual restriction query")
        p.add_argument("--parse-fixtures",
                       help="fixture parses for syntactic queries (JSONL)")
        p.add_argument("--parse-command",
                       help="external annotator command for syntactic "
                            "queries")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                       help="per-sentence capture-product cap")

    p = sub.add_parser("query", help="run a query and print hits")
    query_args(p)
    p.add_argument("--limit", type=int, default=0,
                   help="maximum hits to print (0 = all)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("export", help="export matches as TSV")
    query_args(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("aggregate",
                       help="group matches by a capture and rank by "
                            "frequency")
    query_args(p)
    p.add_argument("--capture", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--plot", help="also render a bar-chart figure (PNG)")
    p.add_argument("--plot-top", type=int, default=25)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("tag",
                       help="apply an entity lexicon and write the tagged "
                            "corpus and/or a rebuilt index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True,
                   help="text file, one surface form per line")
    p.add_argument("--type", required=True, help="entity type name")
    p.add_argument("--out", help="tagged corpus output path")
    p.add_argument("--index-out", help="rebuilt index output path")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--index", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--parse-fixtures")
    p.add_argument("--parse-command")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QueryError, SemanticError) as exc:
        _err(str(exc))
        return 1
    except (CorpusError, IndexFormatError, OSError) as exc:
        _err(str(exc))
        return 2
    except ExsearchError as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
