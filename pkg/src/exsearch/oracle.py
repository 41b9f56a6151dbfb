"""Index-free brute-force evaluator: the correctness reference.

Deliberately simple nested loops and exhaustive enumeration over the raw
corpus; no postings, no candidate pruning. Shares only the Match/Span data
carriers with the indexed evaluators, not their logic.
"""

import re

from .match import DEFAULT_CAP, DEFAULT_EXPANSION_BLOCKLIST, Match, Span
from .queryast import (
    BooleanQuery, Gap, QueryGraph, Repetition, SequentialQuery, Term,
    Wildcard, CASE_FOLDED_FIELDS,
)


def _fold(fname, value):
    return value.lower() if fname in CASE_FOLDED_FIELDS else value


def _value_of(tok, fname):
    return {"word": tok.word, "lemma": tok.lemma, "tag": tok.tag,
            "entity": tok.entity}[fname]


def _fc_ok(fc, value):
    if value is None:
        return False
    if fc.regex is not None:
        flags = re.IGNORECASE if fc.field in CASE_FOLDED_FIELDS else 0
        return re.fullmatch(fc.regex, value, flags) is not None
    for v in fc.values:
        if fc.field == "word" and " " in v:
            continue
        if _fold(fc.field, v) == _fold(fc.field, value):
            return True
    return False


def _tok_ok(tc, tok, skip=()):
    for fc in tc.conjuncts:
        if fc.field in skip:
            continue
        if not _fc_ok(fc, _value_of(tok, fc.field)):
            return False
    return True


def _mentions(sent):
    out = []
    i = 0
    while i < len(sent.tokens):
        tok = sent.tokens[i]
        if tok.entity is not None and tok.entity_role == "B":
            j = i + 1
            while (j < len(sent.tokens)
                   and sent.tokens[j].entity == tok.entity
                   and sent.tokens[j].entity_role == "I"):
                j += 1
            out.append((i, j - 1, tok.entity))
            i = j
        else:
            i += 1
    return out


def _phrase_values(tc):
    fc = tc.by_field("word")
    if fc is None or fc.regex is not None:
        return []
    return [v for v in fc.values if " " in v]


def _term_spans(sent, tc):
    ent = tc.by_field("entity")
    spans = []
    if ent is not None:
        for start, end, label in _mentions(sent):
            if _fc_ok(ent, label) and _tok_ok(tc, sent.tokens[start],
                                              skip=("entity",)):
                spans.append((start, end))
        return spans
    for pos, tok in enumerate(sent.tokens):
        if _tok_ok(tc, tok):
            spans.append((pos, pos))
    for value in _phrase_values(tc):
        words = value.lower().split()
        for pos in range(len(sent.tokens) - len(words) + 1):
            if all(sent.tokens[pos + k].word.lower() == w
                   for k, w in enumerate(words)) \
                    and _tok_ok(tc, sent.tokens[pos], skip=("word",)):
                spans.append((pos, pos + len(words) - 1))
    spans.sort()
    return spans


# -- naive expansion --------------------------------------------------------

def _expand(sent, seed_start, seed_end, blocklist):
    parent = {}
    label = {}
    for head, dep, lab in sent.edges:
        if dep not in parent and dep != sent.root:
            parent[dep] = head
            label[dep] = lab
    def depth(i):
        d = 0
        while i in parent:
            i = parent[i]
            d += 1
            if d > len(sent.tokens):
                break
        return d
    seed = min(range(seed_start, seed_end + 1), key=depth)
    keep = {seed}
    changed = True
    while changed:
        changed = False
        for dep in range(len(sent.tokens)):
            if dep in keep or dep not in parent:
                continue
            if parent[dep] in keep \
                    and label[dep].split(":", 1)[0] not in blocklist:
                keep.add(dep)
                changed = True
    start = seed
    while start - 1 in keep:
        start -= 1
    end = seed
    while end + 1 in keep:
        end += 1
    return min(seed_start, start), max(seed_end, end)


# -- naive context scanner --------------------------------------------------

def _meta_tokens(text):
    return re.findall(r"\w+", text.lower())


def _tokens_hold(tokens, clause):
    if clause.kind == "term":
        return clause.value.lower() in tokens
    if clause.kind == "phrase":
        phrase = _meta_tokens(clause.value)
        return bool(phrase) and any(
            tokens[i:i + len(phrase)] == phrase
            for i in range(len(tokens) - len(phrase) + 1))
    if clause.kind == "prefix":
        return any(t.startswith(clause.value.lower()) for t in tokens)
    if clause.kind == "regex":
        return any(re.fullmatch(clause.value, t, re.IGNORECASE)
                   for t in tokens)
    return False


def clause_holds(doc, clause, paragraph_id):
    """Naive per-document clause check, scanning the metadata directly."""
    if clause.field == "year":
        if doc.year is None:
            return False
        if clause.kind == "range":
            return clause.low <= doc.year <= clause.high
        return doc.year == int(clause.value)
    if clause.field in ("mesh", "venue"):
        values = [m.lower() for m in doc.mesh] if clause.field == "mesh" \
            else ([doc.venue.lower()] if doc.venue else [])
        if clause.kind in ("term", "phrase"):
            return clause.value.lower() in values
        tokens = [t for v in values for t in _meta_tokens(v)]
        return _tokens_hold(tokens, clause)
    if clause.field == "paragraph":
        text = doc.paragraphs.get(paragraph_id)
        if text is None:
            return False
        return _tokens_hold(_meta_tokens(text), clause)
    if clause.field == "authors":
        return _tokens_hold(_meta_tokens(" ".join(doc.authors)), clause)
    text = doc.title if clause.field == "title" else doc.abstract
    return _tokens_hold(_meta_tokens(text), clause)


def context_admits(doc, ctx, paragraph_id):
    shoulds = []
    for clause in ctx.clauses:
        sat = clause_holds(doc, clause, paragraph_id)
        if clause.polarity == "must" and not sat:
            return False
        if clause.polarity == "must_not" and sat:
            return False
        if clause.polarity == "should":
            shoulds.append(sat)
    return any(shoulds) if shoulds else True


# -- per-sentence enumeration ----------------------------------------------

def _bool_bindings(sent, query, cap, blocklist):
    span_lists = []
    for term in query.terms:
        spans = _term_spans(sent, term.constraint)
        if not spans and not term.optional:
            return [], False
        if spans:
            span_lists.append((term, spans))
    bindings = []
    seen = set()
    truncated = False

    def rec(i, chosen):
        nonlocal truncated
        if truncated:
            return
        if i == len(span_lists):
            binding = {}
            for (term, _spans), span in zip(span_lists, chosen):
                if term.capture is not None:
                    out = span
                    if term.expand:
                        out = _expand(sent, span[0], span[1], blocklist)
                    binding[term.capture] = out
            key = tuple(sorted(binding.items()))
            if key in seen:
                return
            if len(bindings) >= cap:
                truncated = True
                return
            seen.add(key)
            bindings.append(binding)
            return
        _term, spans = span_lists[i]
        for span in spans:
            if all(span[1] < o[0] or o[1] < span[0] for o in chosen):
                rec(i + 1, chosen + [span])

    rec(0, [])
    return bindings, truncated


def _seq_bindings(sent, query, cap, blocklist):
    n = len(sent.tokens)
    bindings = []
    seen = set()
    truncated = False

    def emit(binding):
        nonlocal truncated
        key = tuple(sorted(binding.items()))
        if key in seen:
            return
        if len(bindings) >= cap:
            truncated = True
            return
        seen.add(key)
        bindings.append(dict(binding))

    def widths_of(tc, pos):
        widths = []
        if pos < n and _tok_ok(tc, sent.tokens[pos]):
            widths.append(1)
        if tc.by_field("entity") is None:
            for value in _phrase_values(tc):
                words = value.lower().split()
                if pos + len(words) <= n and all(
                        sent.tokens[pos + k].word.lower() == w
                        for k, w in enumerate(words)) \
                        and _tok_ok(tc, sent.tokens[pos], skip=("word",)) \
                        and len(words) not in widths:
                    widths.append(len(words))
        return sorted(widths)

    def rec(ei, pos, binding):
        if truncated:
            return
        if ei == len(query.elements):
            emit(binding)
            return
        el = query.elements[ei]
        if isinstance(el, Term):
            if el.optional:
                rec(ei + 1, pos, binding)
            for width in widths_of(el.constraint, pos):
                out = (pos, pos + width - 1)
                if el.capture is not None:
                    if el.constraint.by_field("entity") is not None:
                        for s, e, _lab in _mentions(sent):
                            if s <= pos <= e:
                                out = (s, e)
                                break
                    if el.expand:
                        out = _expand(sent, out[0], out[1], blocklist)
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
            for width in range(el.min, hi + 1):
                if all(_tok_ok(el.constraint, sent.tokens[pos + k])
                       for k in range(width)):
                    rec(ei + 1, pos + width, binding)
                else:
                    break

    for start in range(n):
        rec(0, start, {})
        if truncated:
            break
    return bindings, truncated


def _graph_bindings(sent, graph, cap, blocklist):
    nodes = graph.nodes
    id_to_pos = {node.id: i for i, node in enumerate(nodes)}
    edge_set = {(h, d, lab) for h, d, lab in sent.edges}
    bindings = []
    seen = set()
    truncated = False

    def rec(mapping):
        nonlocal truncated
        if truncated:
            return
        if len(mapping) == len(nodes):
            for frm, to, label in graph.edges:
                if (mapping[id_to_pos[frm]], mapping[id_to_pos[to]],
                        label) not in edge_set:
                    return
            binding = {}
            for node, pos in zip(nodes, mapping):
                if node.capture is not None:
                    out = (pos, pos)
                    if node.expand:
                        out = _expand(sent, pos, pos, blocklist)
                    binding[node.capture] = out
            key = tuple(sorted(binding.items()))
            if key in seen:
                return
            if len(bindings) >= cap:
                truncated = True
                return
            seen.add(key)
            bindings.append(binding)
            return
        node = nodes[len(mapping)]
        for pos, tok in enumerate(sent.tokens):
            if pos in mapping:
                continue
            if node.constraint is None or _tok_ok(node.constraint, tok):
                rec(mapping + [pos])

    rec([])
    return bindings, truncated


def oracle_eval(corpus, query, cap=DEFAULT_CAP,
                blocklist=DEFAULT_EXPANSION_BLOCKLIST):
    """Full-scan reference evaluation; returns a list of Match objects."""
    if isinstance(query, BooleanQuery):
        per_sentence, mode = _bool_bindings, "boolean"
    elif isinstance(query, SequentialQuery):
        per_sentence, mode = _seq_bindings, "sequential"
    elif isinstance(query, QueryGraph):
        per_sentence, mode = _graph_bindings, "syntactic"
    else:
        raise TypeError(type(query))
    out = []
    for ordinal, sent in enumerate(corpus.sentences):
        if query.context is not None:
            doc = corpus.documents[sent.doc_id]
            if not context_admits(doc, query.context, sent.paragraph_id):
                continue
        bindings, _truncated = per_sentence(sent, query, cap, blocklist)
        matches = []
        for binding in bindings:
            captures = {}
            for name, (ts, te) in binding.items():
                cs = sent.tokens[ts].char_start
                ce = sent.tokens[te].char_end
                captures[name] = Span(token_start=ts, token_end=te,
                                      char_start=cs, char_end=ce,
                                      text=sent.text[cs:ce])
            matches.append(Match(doc_id=sent.doc_id, sent_id=sent.sent_id,
                                 ordinal=ordinal, captures=captures,
                                 mode=mode))
        matches.sort(key=lambda m: sorted(
            (n, s.token_start, s.token_end)
            for n, s in m.captures.items()))
        out.extend(matches)
    return out
