"""Example-sentence markup: parsing and translation into a query graph.

A query is written as a natural-language sentence where words carry marks:
``$word`` anchors (must match), ``name:word`` captures (variables),
``<>name:word`` expanded captures, and ``[...]`` restrictions such as
``name:[e]word`` (infer the entity type from the example) or
``$[lemma]induces`` (anchor on the lemma instead of the surface form).
Unmarked words are scaffolding: they shape the graph but impose no
constraints and are dropped when they lie off the paths connecting the
marked words.
"""

import json
import re
import subprocess
from dataclasses import dataclass

from .corpus import AnnotatedSentence, sentence_from_record, validate_sentence
from .errors import QueryError, SemanticError
from .parser import parse_constraint, parse_context, render_constraint, \
    split_context
from .queryast import (
    ContextQuery, FieldConstraint, QueryGraph, QueryGraphNode, TermConstraint,
    FIELD_SHORT, FIELD_ABBREV,
)

_INFER_FIELDS = dict(FIELD_SHORT)
_INFER_FIELDS.update({f: f for f in ("word", "lemma", "tag", "entity")})

_CAPTURE_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)?:")


@dataclass(frozen=True)
class Mark:
    kind: str  # "anchor" | "capture" | "scaffold"
    name: str | None = None
    expand: bool = False
    infer_field: str | None = None  # field-inference request
    restriction: TermConstraint | None = None  # explicit restriction


@dataclass(frozen=True)
class MarkedSentence:
    plain_text: str
    words: tuple[str, ...]
    marks: tuple[Mark, ...]
    context: ContextQuery | None = None


class ParseProvider:
    """Supplies a dependency annotation for an example sentence."""

    def annotate(self, text: str) -> AnnotatedSentence:
        raise NotImplementedError


def parse_markup(text: str) -> MarkedSentence:
    body, ctx_text, ctx_off = split_context(text)
    context = parse_context(ctx_text, base=ctx_off) if ctx_text is not None \
        else None
    words = []
    marks = []
    seen_names = set()
    pos = 0
    raw = body.split()
    if not raw:
        raise QueryError(0, "empty-query", "empty query")
    for tok in raw:
        off = body.index(tok, pos)
        pos = off + len(tok)
        words_mark = _parse_marked_token(tok, off, seen_names)
        words.append(words_mark[0])
        marks.append(words_mark[1])
    if not any(m.kind != "scaffold" for m in marks):
        raise QueryError(0, "no-marks", "no anchors or captures in query")
    return MarkedSentence(plain_text=" ".join(words), words=tuple(words),
                          marks=tuple(marks), context=context)


def _parse_marked_token(tok, off, seen_names):
    i = 0
    expand = False
    if tok.startswith("<>"):
        expand = True
        i = 2
    name = None
    is_capture = False
    m = _CAPTURE_RE.match(tok, i)
    if m:
        is_capture = True
        name = m.group(1)
        i = m.end()
    is_anchor = False
    if tok.startswith("$", i):
        is_anchor = True
        i += 1
        if _CAPTURE_RE.match(tok, i):
            is_capture = True
    if is_anchor and is_capture:
        raise QueryError(off, "anchor-and-capture",
                         "a token cannot be both anchor and capture")
    infer_field = None
    restriction = None
    if tok.startswith("[", i):
        end = tok.find("]", i)
        if end < 0:
            raise QueryError(off + i, "bad-restriction",
                             "unclosed restriction bracket")
        inner = tok[i + 1:end]
        if inner in _INFER_FIELDS:
            infer_field = _INFER_FIELDS[inner]
        else:
            restriction = parse_constraint(inner, off + i + 1)
        i = end + 1
    word = tok[i:]
    if not word:
        raise QueryError(off, "empty-word", "mark %r has no word" % tok)
    if not (is_anchor or is_capture):
        if expand or infer_field or restriction:
            raise QueryError(off, "mark-without-role",
                             "expansion or restriction requires an anchor "
                             "or capture")
        return word, Mark(kind="scaffold")
    if is_anchor:
        if expand:
            raise QueryError(off, "expand-without-capture",
                             "expansion requires a capture")
        return word, Mark(kind="anchor", infer_field=infer_field,
                          restriction=restriction)
    if name is None:
        base = 1
        while "cap%d" % base in seen_names:
            base += 1
        name = "cap%d" % base
    elif name in seen_names:
        raise QueryError(off, "duplicate-capture",
                         "duplicate capture name %r" % name)
    seen_names.add(name)
    return word, Mark(kind="capture", name=name, expand=expand,
                      infer_field=infer_field, restriction=restriction)


def render_markup(marked: MarkedSentence) -> str:
    from .parser import render
    parts = []
    for word, mark in zip(marked.words, marked.marks):
        out = ""
        if mark.kind == "capture":
            if mark.expand:
                out += "<>"
            out += "%s:" % mark.name
        elif mark.kind == "anchor":
            out += "$"
        if mark.infer_field:
            out += "[%s]" % FIELD_ABBREV[mark.infer_field]
        elif mark.restriction is not None:
            out += "[%s]" % render_constraint(mark.restriction,
                                              allow_bare=False)
        parts.append(out + word)
    body = " ".join(parts)
    if marked.context is not None:
        body += " #d " + render(marked.context)
    return body


def infer_restriction(field: str, token) -> TermConstraint:
    """Build the constraint a field-inference request stands for."""
    value = getattr(token, field)
    if value is None:
        raise SemanticError(
            "cannot infer %s: example token %r carries no %s label"
            % (field, token.word, field))
    return TermConstraint(conjuncts=(
        FieldConstraint(field=field, values=(value,)),))


def _basic_tree(sent: AnnotatedSentence):
    """(parent map, tree edge map {(head, dep): label}) of the basic tree."""
    head_of = {}
    label_of = {}
    for head, dep, label in sent.edges:
        if dep not in head_of and dep != sent.root:
            head_of[dep] = head
            label_of[(head, dep)] = label
    return head_of, label_of


def _tree_path(a, b, head_of):
    """Node sequence of the unique undirected tree path from a to b."""
    anc_a = [a]
    cur = a
    while cur in head_of:
        cur = head_of[cur]
        anc_a.append(cur)
    index_a = {n: i for i, n in enumerate(anc_a)}
    path_b = [b]
    cur = b
    while cur not in index_a:
        if cur not in head_of:
            return None
        cur = head_of[cur]
        path_b.append(cur)
    meet = path_b[-1]
    return anc_a[:index_a[meet]] + list(reversed(path_b))


def compile_query(marked: MarkedSentence, provider: ParseProvider) \
        -> QueryGraph:
    """Translate a marked-up example sentence into a query graph.

    The graph is the minimal connected subgraph of the example's basic
    dependency tree spanning all anchor and capture tokens; scaffold tokens
    on the connecting paths become unconstrained internal nodes.
    """
    ann = provider.annotate(marked.plain_text)
    surfaces = [t.word for t in ann.tokens]
    if list(marked.words) != surfaces:
        raise SemanticError(
            "marked tokens do not align with the annotation: %r vs %r"
            % (list(marked.words), surfaces))
    marked_idx = [i for i, m in enumerate(marked.marks)
                  if m.kind != "scaffold"]
    head_of, label_of = _basic_tree(ann)
    keep = set()
    first = marked_idx[0]
    for other in marked_idx:
        path = _tree_path(first, other, head_of)
        if path is None:
            raise SemanticError(
                "example parse is disconnected over the marked tokens")
        keep.update(path)
    # union of pairwise paths == union of paths from one terminal on a tree
    # only when the terminal set is connected through it; take all pairs to
    # be safe with multi-branch configurations
    for i, a in enumerate(marked_idx):
        for b in marked_idx[i + 1:]:
            path = _tree_path(a, b, head_of)
            if path is None:
                raise SemanticError(
                    "example parse is disconnected over the marked tokens")
            keep.update(path)
    nodes = []
    for idx in sorted(keep):
        mark = marked.marks[idx]
        token = ann.tokens[idx]
        constraint = None
        capture = None
        expand = False
        if mark.kind == "anchor":
            if mark.restriction is not None:
                constraint = mark.restriction
            else:
                constraint = infer_restriction(mark.infer_field or "word",
                                               token)
        elif mark.kind == "capture":
            capture = mark.name
            expand = mark.expand
            if mark.restriction is not None:
                constraint = mark.restriction
            elif mark.infer_field is not None:
                constraint = infer_restriction(mark.infer_field, token)
        nodes.append(QueryGraphNode(id=idx, constraint=constraint,
                                    capture=capture, expand=expand))
    edges = []
    for (head, dep), label in sorted(label_of.items()):
        if head in keep and dep in keep:
            edges.append((head, dep, label))
    return QueryGraph(nodes=tuple(nodes), edges=tuple(edges),
                      context=marked.context)


class FixtureParseProvider(ParseProvider):
    """Exact-text lookup over pre-annotated sentences (interchange format)."""

    def __init__(self, sentences):
        self._by_text = {}
        for sent in sentences:
            self._by_text[sent.text] = sent

    @classmethod
    def from_file(cls, path):
        sentences = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec.get("kind", "sentence") != "sentence":
                    continue
                sent = sentence_from_record(rec)
                validate_sentence(sent)
                sentences.append(sent)
        return cls(sentences)

    def annotate(self, text: str) -> AnnotatedSentence:
        sent = self._by_text.get(text)
        if sent is None:
            raise SemanticError("no fixture parse for %r" % text)
        return sent


class CommandParseProvider(ParseProvider):
    """Adapter around an external annotator process.

    The command receives the sentence text on stdin and must print a single
    interchange-format sentence record (JSON) on stdout.
    """

    def __init__(self, command):
        self.command = command

    def annotate(self, text: str) -> AnnotatedSentence:
        proc = subprocess.run(self.command, input=text, capture_output=True,
                              text=True, shell=isinstance(self.command, str))
        if proc.returncode != 0:
            raise SemanticError(
                "annotator command failed (%d): %s"
                % (proc.returncode, proc.stderr.strip()))
        try:
            rec = json.loads(proc.stdout)
        except json.JSONDecodeError as exc:
            raise SemanticError("annotator produced invalid JSON: %s" % exc)
        sent = sentence_from_record(rec)
        validate_sentence(sent)
        return sent
