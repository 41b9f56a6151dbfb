"""Query evaluation against an index: boolean, sequential, and syntactic.

Result streams are deterministic: sentences in ordinal order, matches within
a sentence sorted by their capture spans. Per sentence at most ``cap``
distinct capture tuples are produced (counted in canonical enumeration
order: query order, positions ascending); overflow is flagged through
:class:`EvalStats`.
"""

import re
from dataclasses import dataclass, field

from .index import fold
from .queryast import (
    BooleanQuery, Gap, QueryGraph, Repetition, SequentialQuery, Term,
    Wildcard, CASE_FOLDED_FIELDS,
)

DEFAULT_CAP = 64

# dependency relations never crossed when expanding a capture to its phrase
DEFAULT_EXPANSION_BLOCKLIST = frozenset(
    {"conj", "cc", "appos", "punct", "acl", "advcl", "ccomp", "xcomp"})


@dataclass(frozen=True)
class Span:
    token_start: int
    token_end: int  # inclusive
    char_start: int
    char_end: int
    text: str


@dataclass
class Match:
    doc_id: str
    sent_id: str
    ordinal: int
    captures: dict
    mode: str

    def key(self):
        """Hashable identity for multiset comparisons."""
        caps = tuple(sorted(
            (name, span.token_start, span.token_end)
            for name, span in self.captures.items()))
        return (self.ordinal, caps)


@dataclass
class EvalStats:
    truncated_sentences: list = field(default_factory=list)
    full_scan: bool = False
    candidates: int = 0

    @property
    def truncated(self):
        return bool(self.truncated_sentences)


def make_span(sent, token_start, token_end) -> Span:
    cs = sent.tokens[token_start].char_start
    ce = sent.tokens[token_end].char_end
    return Span(token_start=token_start, token_end=token_end,
                char_start=cs, char_end=ce, text=sent.text[cs:ce])


# ---------------------------------------------------------------------------
# constraint checks

def _token_field(tok, fname):
    if fname == "word":
        return tok.word
    if fname == "lemma":
        return tok.lemma
    if fname == "tag":
        return tok.tag
    return tok.entity


def fc_matches_value(fc, value):
    if value is None:
        return False
    if fc.regex is not None:
        flags = re.IGNORECASE if fc.field in CASE_FOLDED_FIELDS else 0
        return re.fullmatch(fc.regex, value, flags) is not None
    folded = fold(fc.field, value)
    return any(fold(fc.field, v) == folded
               for v in fc.values if not (fc.field == "word" and " " in v))


def token_matches(tc, tok, skip=()):
    return all(fc_matches_value(fc, _token_field(tok, fc.field))
               for fc in tc.conjuncts if fc.field not in skip)


def _multi_word_values(tc):
    fc = tc.by_field("word")
    if fc is None or fc.regex is not None:
        return []
    return [v for v in fc.values if " " in v]


def _phrase_at(sent, words, pos):
    if pos + len(words) > len(sent.tokens):
        return False
    return all(sent.tokens[pos + k].word.lower() == w
               for k, w in enumerate(words))


def term_spans(sent, tc):
    """All (start, end) token spans a boolean term matches in a sentence.

    Entity-constrained terms match whole mentions (secondary conjuncts are
    checked on the mention's first token); plain terms match single tokens,
    or consecutive runs for quoted multi-word values.
    """
    ent = tc.by_field("entity")
    spans = []
    if ent is not None:
        for start, end, label in sent.mentions():
            if fc_matches_value(ent, label) and \
                    token_matches(tc, sent.tokens[start], skip=("entity",)):
                spans.append((start, end))
        return spans
    for pos, tok in enumerate(sent.tokens):
        if token_matches(tc, tok):
            spans.append((pos, pos))
    for value in _multi_word_values(tc):
        words = value.lower().split()
        for pos in range(len(sent.tokens) - len(words) + 1):
            if _phrase_at(sent, words, pos) and \
                    token_matches(tc, sent.tokens[pos], skip=("word",)):
                spans.append((pos, pos + len(words) - 1))
    spans.sort()
    return spans


def term_widths(sent, tc, pos):
    """Token counts a sequential term can consume starting at ``pos``."""
    if pos >= len(sent.tokens):
        return []
    widths = set()
    if token_matches(tc, sent.tokens[pos]):
        widths.add(1)
    if tc.by_field("entity") is None:
        for value in _multi_word_values(tc):
            words = value.lower().split()
            if _phrase_at(sent, words, pos) and \
                    token_matches(tc, sent.tokens[pos], skip=("word",)):
                widths.add(len(words))
    return sorted(widths)


def mention_containing(sent, pos):
    for start, end, _label in sent.mentions():
        if start <= pos <= end:
            return (start, end)
    return (pos, pos)


# ---------------------------------------------------------------------------
# expansion

def _basic_tree_edges(sent):
    head_of = {}
    label_of = {}
    for head, dep, label in sent.edges:
        if dep not in head_of and dep != sent.root:
            head_of[dep] = head
            label_of[(head, dep)] = label
    children = {}
    for dep, head in head_of.items():
        children.setdefault(head, []).append(dep)
    return head_of, label_of, children


def expand_capture(sent, token, blocklist=DEFAULT_EXPANSION_BLOCKLIST):
    """Widen a captured token to the contiguous yield of its subtree.

    Descendants reached through a blocklisted relation (base label, before
    any ``:`` subtype) are excluded; if the remaining yield is not
    contiguous it is clipped to the run containing the token.
    """
    _head_of, label_of, children = _basic_tree_edges(sent)
    keep = {token}
    stack = [token]
    while stack:
        node = stack.pop()
        for dep in children.get(node, ()):
            label = label_of[(node, dep)]
            if label.split(":", 1)[0] in blocklist:
                continue
            if dep not in keep:
                keep.add(dep)
                stack.append(dep)
    start = token
    while start - 1 in keep:
        start -= 1
    end = token
    while end + 1 in keep:
        end += 1
    return make_span(sent, start, end)


def _depths(sent):
    head_of, _label_of, _children = _basic_tree_edges(sent)
    depths = {}
    for idx in range(len(sent.tokens)):
        d = 0
        cur = idx
        seen = {cur}
        while cur in head_of:
            cur = head_of[cur]
            if cur in seen:
                break
            seen.add(cur)
            d += 1
        depths[idx] = d
    return depths


def expand_span(sent, token_start, token_end,
                blocklist=DEFAULT_EXPANSION_BLOCKLIST):
    """Expand a (possibly multi-token) capture from its highest token."""
    depths = _depths(sent)
    seed = min(range(token_start, token_end + 1), key=lambda i: depths[i])
    exp = expand_capture(sent, seed, blocklist)
    return make_span(sent, min(token_start, exp.token_start),
                     max(token_end, exp.token_end))


# ---------------------------------------------------------------------------
# boolean evaluation

def _spans_overlap(a, b):
    return not (a[1] < b[0] or b[1] < a[0])


def _finish_matches(sent, ordinal, doc_sent, raw, mode):
    matches = []
    for captures in raw:
        spans = {name: make_span(sent, ts, te)
                 for name, (ts, te) in captures.items()}
        matches.append(Match(doc_id=doc_sent[0], sent_id=doc_sent[1],
                             ordinal=ordinal, captures=spans, mode=mode))
    matches.sort(key=lambda m: sorted(
        (n, s.token_start, s.token_end) for n, s in m.captures.items()))
    return matches


def _bool_sentence(sent, q, cap, blocklist):
    per_term = []
    for term in q.terms:
        spans = term_spans(sent, term.constraint)
        if not spans:
            if term.optional:
                per_term.append(None)
                continue
            return [], False
        per_term.append(spans)
    active = [(term, spans)
              for term, spans in zip(q.terms, per_term) if spans is not None]
    results = []
    seen = set()
    truncated = False

    def rec(i, used, binding):
        nonlocal truncated
        if truncated:
            return
        if i == len(active):
            key = tuple(sorted(binding.items()))
            if key in seen:
                return
            if len(results) >= cap:
                truncated = True
                return
            seen.add(key)
            results.append(dict(binding))
            return
        term, spans = active[i]
        for span in spans:
            if any(_spans_overlap(span, u) for u in used):
                continue
            if term.capture is not None:
                out = span
                if term.expand:
                    exp = expand_span(sent, span[0], span[1], blocklist)
                    out = (exp.token_start, exp.token_end)
                binding[term.capture] = out
            rec(i + 1, used + [span], binding)
            if term.capture is not None:
                del binding[term.capture]
            if truncated:
                return

    rec(0, [], {})
    return results, truncated


# ---------------------------------------------------------------------------
# sequential evaluation

def _seq_sentence(sent, q, cap, blocklist):
    n = len(sent.tokens)
    elements = q.elements
    results = []
    seen = set()
    truncated = False

    def emit(binding):
        nonlocal truncated
        key = tuple(sorted(binding.items()))
        if key in seen:
            return
        if len(results) >= cap:
            truncated = True
            return
        seen.add(key)
        results.append(dict(binding))

    def rec(ei, pos, binding):
        if truncated:
            return
        if ei == len(elements):
            emit(binding)
            return
        el = elements[ei]
        if isinstance(el, Term):
            if el.optional:
                rec(ei + 1, pos, binding)
            for width in term_widths(sent, el.constraint, pos):
                span = (pos, pos + width - 1)
                if el.capture is not None:
                    out = span
                    if el.constraint.by_field("entity") is not None:
                        out = mention_containing(sent, pos)
                    if el.expand:
                        exp = expand_span(sent, out[0], out[1], blocklist)
                        out = (exp.token_start, exp.token_end)
                    binding[el.capture] = out
                rec(ei + 1, pos + width, binding)
                if el.capture is not None:
                    del binding[el.capture]
        elif isinstance(el, Wildcard):
            if pos < n:
                if el.capture is not None:
                    binding[el.capture] = (pos, pos)
                rec(ei + 1, pos + 1, binding)
                if el.capture is not None:
                    del binding[el.capture]
        elif isinstance(el, Gap):
            hi = n - pos if el.max is None else min(el.max, n - pos)
            for width in range(el.min, hi + 1):
                if el.capture is not None and width > 0:
                    binding[el.capture] = (pos, pos + width - 1)
                rec(ei + 1, pos + width, binding)
                if el.capture is not None and width > 0:
                    del binding[el.capture]
        elif isinstance(el, Repetition):
            hi = n - pos if el.max is None else min(el.max, n - pos)
            width = el.min
            ok = all(token_matches(el.constraint, sent.tokens[pos + k])
                     for k in range(min(width, hi)))
            if width <= hi and ok:
                rec(ei + 1, pos + width, binding)
                while width < hi and token_matches(el.constraint,
                                                   sent.tokens[pos + width]):
                    width += 1
                    rec(ei + 1, pos + width, binding)

    for start in range(n):
        rec(0, start, {})
        if truncated:
            break
    return results, truncated


# ---------------------------------------------------------------------------
# syntactic evaluation

def node_matches_token(node, tok):
    if node.constraint is None:
        return True
    return token_matches(node.constraint, tok)


def _graph_sentence(sent, graph, cap, blocklist):
    nodes = graph.nodes
    id_to_pos = {n.id: i for i, n in enumerate(nodes)}
    edge_set = {(h, d, lab) for h, d, lab in sent.edges}
    # edges grouped by the later endpoint in node order, checked as soon as
    # both endpoints are mapped
    edges_at = [[] for _ in nodes]
    for frm, to, label in graph.edges:
        i, j = id_to_pos[frm], id_to_pos[to]
        edges_at[max(i, j)].append((i, j, label))
    candidates = []
    for node in nodes:
        candidates.append([pos for pos, tok in enumerate(sent.tokens)
                           if node_matches_token(node, tok)])
    results = []
    seen = set()
    truncated = False

    def rec(i, mapping):
        nonlocal truncated
        if truncated:
            return
        if i == len(nodes):
            binding = {}
            for node, pos in zip(nodes, mapping):
                if node.capture is not None:
                    span = (pos, pos)
                    if node.expand:
                        exp = expand_span(sent, pos, pos, blocklist)
                        span = (exp.token_start, exp.token_end)
                    binding[node.capture] = span
            key = tuple(sorted(binding.items()))
            if key in seen:
                return
            if len(results) >= cap:
                truncated = True
                return
            seen.add(key)
            results.append(binding)
            return
        for pos in candidates[i]:
            if pos in mapping:
                continue
            ok = True
            for a, b, label in edges_at[i]:
                pa = pos if a == i else mapping[a]
                pb = pos if b == i else mapping[b]
                if (pa, pb, label) not in edge_set:
                    ok = False
                    break
            if ok:
                rec(i + 1, mapping + [pos])
                if truncated:
                    return

    rec(0, [])
    return results, truncated


# ---------------------------------------------------------------------------
# top-level streams

def _required_constraints(query):
    if isinstance(query, BooleanQuery):
        return [t.constraint for t in query.terms if not t.optional]
    if isinstance(query, SequentialQuery):
        out = []
        for el in query.elements:
            if isinstance(el, Term) and not el.optional:
                out.append(el.constraint)
            elif isinstance(el, Repetition) and el.min >= 1:
                out.append(el.constraint)
        return out
    if isinstance(query, QueryGraph):
        return [n.constraint for n in query.nodes if n.constraint is not None]
    raise TypeError(type(query))


def _evaluate(index, query, sentence_fn, mode, cap, stats, blocklist):
    constraints = _required_constraints(query)
    if not constraints and stats is not None:
        stats.full_scan = True
    ordinals = sorted(index.candidates(constraints))
    if stats is not None:
        stats.candidates = len(ordinals)
    filt = index.doc_filter(query.context) \
        if query.context is not None else None
    for ordinal in ordinals:
        sent = index.sentence(ordinal)
        if filt is not None and \
                not filt.admits(sent.doc_id, sent.paragraph_id):
            continue
        raw, truncated = sentence_fn(sent, query, cap, blocklist)
        if truncated and stats is not None:
            stats.truncated_sentences.append(ordinal)
        yield from _finish_matches(sent, ordinal,
                                   (sent.doc_id, sent.sent_id), raw, mode)


def eval_boolean(index, query: BooleanQuery, cap=DEFAULT_CAP, stats=None,
                 blocklist=DEFAULT_EXPANSION_BLOCKLIST):
    return _evaluate(index, query, _bool_sentence, "boolean", cap, stats,
                     blocklist)


def eval_sequential(index, query: SequentialQuery, cap=DEFAULT_CAP,
                    stats=None, blocklist=DEFAULT_EXPANSION_BLOCKLIST):
    return _evaluate(index, query, _seq_sentence, "sequential", cap, stats,
                     blocklist)


def eval_syntactic(index, graph: QueryGraph, cap=DEFAULT_CAP, stats=None,
                   blocklist=DEFAULT_EXPANSION_BLOCKLIST):
    return _evaluate(index, graph, _graph_sentence, "syntactic", cap, stats,
                     blocklist)


def evaluate(index, query, cap=DEFAULT_CAP, stats=None,
             blocklist=DEFAULT_EXPANSION_BLOCKLIST):
    if isinstance(query, BooleanQuery):
        return eval_boolean(index, query, cap, stats, blocklist)
    if isinstance(query, SequentialQuery):
        return eval_sequential(index, query, cap, stats, blocklist)
    if isinstance(query, QueryGraph):
        return eval_syntactic(index, query, cap, stats, blocklist)
    raise TypeError(type(query))
