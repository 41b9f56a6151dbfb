"""Parsers and printers for boolean, sequential, and context queries.

All three languages share one term-constraint grammar (see
docs/query-syntax.md). Errors are raised as :class:`QueryError` carrying a
character offset into the original query string, an error code, and a
message.
"""

import re

from .errors import QueryError
from .queryast import (
    BooleanQuery, ContextClause, ContextQuery, FieldConstraint, Gap,
    Repetition, SequentialQuery, Term, TermConstraint, Wildcard,
    CONTEXT_FIELDS, FIELD_ABBREV, FIELD_SHORT, FIELDS,
)

_CAPTURE_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)?:")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_GAP_RE = re.compile(r"\.\.\.(?:(\d+)-(\d+)\.\.\.)?\Z")
_REP_RE = re.compile(r"\[(.*)\](\*|\+|\?|\{(\d+),(\d+)\})\Z")
_FIELD_RE = re.compile(r"(word|lemma|tag|entity|[wlte])=")
_CONTEXT_CLAUSE_RE = re.compile(
    r"([+-])?(%s):(.+)\Z" % "|".join(CONTEXT_FIELDS), re.DOTALL)
_RANGE_RE = re.compile(r"\[\s*(\S+)\s+TO\s+(\S+)\s*\]\Z")

# characters that force quoting of a literal value when rendered
_UNSAFE_VALUE_RE = re.compile(r"[\s\"&|=:\[\]{}#<>?]")


def _tokenize(text, base=0):
    """Split on whitespace outside double quotes; yield (token, offset)."""
    toks = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start = i
        in_quote = False
        while i < n and (in_quote or not text[i].isspace()):
            if text[i] == '"':
                in_quote = not in_quote
            elif text[i] == "\\" and in_quote and i + 1 < n:
                i += 1
            i += 1
        if in_quote:
            raise QueryError(base + start, "unterminated-quote",
                             "unterminated double quote")
        toks.append((text[start:i], base + start))
    return toks


def _unquote(value, off):
    out = []
    i = 1
    while i < len(value) - 1:
        c = value[i]
        if c == "\\" and i + 1 < len(value) - 1:
            i += 1
            c = value[i]
        out.append(c)
        i += 1
    if not value.endswith('"') or len(value) < 2:
        raise QueryError(off, "unterminated-quote", "unterminated double quote")
    return "".join(out)


def _split_outside_quotes(text, sep):
    """Split on a single-char separator that is outside double quotes."""
    parts = []
    cur = []
    in_quote = False
    i = 0
    while i < len(text):
        c = text[i]
        if c == '"':
            in_quote = not in_quote
            cur.append(c)
        elif c == "\\" and in_quote and i + 1 < len(text):
            cur.append(c)
            cur.append(text[i + 1])
            i += 1
        elif c == sep and not in_quote:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
        i += 1
    parts.append("".join(cur))
    return parts


def parse_constraint(text, off):
    """Parse a term-constraint string such as ``lemma=cause|reason&tag=NN``."""
    if not text:
        raise QueryError(off, "empty-term", "empty term")
    conjuncts = []
    seen_fields = set()
    pos = off
    for part in _split_outside_quotes(text, "&"):
        if not part:
            raise QueryError(pos, "empty-conjunct", "empty field constraint")
        m = _FIELD_RE.match(part)
        if m:
            fname = FIELD_SHORT.get(m.group(1), m.group(1))
            value_text = part[m.end():]
            value_off = pos + m.end()
        else:
            bad = re.match(r"([A-Za-z][A-Za-z0-9_]*)=", part)
            if bad:
                raise QueryError(pos, "unknown-field",
                                 "unknown field name %r (quote the value to "
                                 "match it literally)" % bad.group(1))
            fname = "word"
            value_text = part
            value_off = pos
        if fname in seen_fields:
            raise QueryError(pos, "duplicate-field",
                             "more than one constraint on field %r" % fname)
        seen_fields.add(fname)
        conjuncts.append(_parse_field_value(fname, value_text, value_off))
        pos += len(part) + 1
    return TermConstraint(conjuncts=tuple(conjuncts))


def _parse_field_value(fname, text, off):
    if not text:
        raise QueryError(off, "empty-value", "empty value for field %r" % fname)
    if text.startswith("/") and text.endswith("/") and len(text) >= 2:
        pattern = text[1:-1]
        try:
            re.compile(pattern)
        except re.error as exc:
            raise QueryError(off, "bad-regex",
                             "invalid regular expression: %s" % exc)
        return FieldConstraint(field=fname, regex=pattern)
    values = []
    pos = off
    for alt in _split_outside_quotes(text, "|"):
        if not alt:
            raise QueryError(pos, "empty-alternative", "empty alternative")
        if alt.startswith('"'):
            values.append(_unquote(alt, pos))
        elif alt.startswith("/") and alt.endswith("/") and len(alt) >= 2:
            raise QueryError(pos, "regex-alternative",
                             "a regex cannot be combined with alternatives")
        else:
            values.append(alt)
        pos += len(alt) + 1
    return FieldConstraint(field=fname, values=tuple(values))


class _AutoNamer:
    def __init__(self):
        self.used = set()
        self.counter = 0

    def claim(self, name, off):
        if name in self.used:
            raise QueryError(off, "duplicate-capture",
                             "duplicate capture name %r" % name)
        self.used.add(name)

    def fresh(self, off):
        while True:
            self.counter += 1
            name = "cap%d" % self.counter
            if name not in self.used:
                self.used.add(name)
                return name


def _parse_prefixes(tok, off, namer):
    """Strip ?, <>, and capture prefixes; return (rest, rest_off, term kw)."""
    optional = False
    expand = False
    i = 0
    while True:
        if tok.startswith("?", i) and not optional:
            optional = True
            i += 1
        elif tok.startswith("<>", i) and not expand:
            expand = True
            i += 2
        else:
            break
    capture = None
    m = _CAPTURE_RE.match(tok, i)
    if m:
        if m.group(1) is None:
            capture = namer.fresh(off + i)
        else:
            capture = m.group(1)
            namer.claim(capture, off + i)
        i = m.end()
    return tok[i:], off + i, optional, expand, capture


def _parse_element(tok, off, namer, sequential):
    rest, roff, optional, expand, capture = _parse_prefixes(tok, off, namer)
    if not rest:
        raise QueryError(off, "empty-term", "term %r has no constraint" % tok)
    if sequential:
        if rest == "*":
            if optional or expand:
                raise QueryError(off, "bad-wildcard",
                                 "wildcards cannot be optional or expanded")
            return Wildcard(capture=capture)
        m = _GAP_RE.match(rest)
        if m:
            if optional or expand:
                raise QueryError(off, "bad-gap",
                                 "gaps cannot be optional or expanded")
            if m.group(1) is None:
                return Gap(min=0, max=None, capture=capture)
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo > hi:
                raise QueryError(roff, "bad-gap",
                                 "gap minimum exceeds maximum")
            return Gap(min=lo, max=hi, capture=capture)
        m = _REP_RE.match(rest)
        if m:
            if optional or expand or capture is not None:
                raise QueryError(off, "bad-repetition",
                                 "repetitions cannot be captured, optional, "
                                 "or expanded")
            constraint = parse_constraint(m.group(1), roff + 1)
            quant = m.group(2)
            if quant == "*":
                lo, hi = 0, None
            elif quant == "+":
                lo, hi = 1, None
            elif quant == "?":
                lo, hi = 0, 1
            else:
                lo, hi = int(m.group(3)), int(m.group(4))
                if lo > hi:
                    raise QueryError(roff, "bad-repetition",
                                     "repetition minimum exceeds maximum")
            return Repetition(constraint=constraint, min=lo, max=hi)
    constraint = parse_constraint(rest, roff)
    if expand and capture is None:
        raise QueryError(off, "expand-without-capture",
                         "expansion requires a capture")
    return Term(constraint=constraint, optional=optional, capture=capture,
                expand=expand)


def split_context(text):
    """Split ``query #d context`` into (query part, context part, offset)."""
    m = re.search(r"(?:^|\s)#d(?:\s|$)", text)
    if not m:
        return text, None, None
    ctx_off = m.end()
    return text[:m.start()], text[ctx_off:], ctx_off


def parse_boolean(text: str) -> BooleanQuery:
    body, ctx_text, ctx_off = split_context(text)
    context = parse_context(ctx_text, base=ctx_off) if ctx_text is not None \
        else None
    toks = _tokenize(body)
    if not toks:
        raise QueryError(0, "empty-query", "empty query")
    namer = _AutoNamer()
    terms = []
    for tok, off in toks:
        el = _parse_element(tok, off, namer, sequential=False)
        terms.append(el)
    if all(t.optional for t in terms):
        raise QueryError(0, "all-optional", "all terms are optional")
    return BooleanQuery(terms=tuple(terms), context=context)


def parse_sequential(text: str) -> SequentialQuery:
    body, ctx_text, ctx_off = split_context(text)
    context = parse_context(ctx_text, base=ctx_off) if ctx_text is not None \
        else None
    toks = _tokenize(body)
    if not toks:
        raise QueryError(0, "empty-query", "empty query")
    namer = _AutoNamer()
    elements = []
    for tok, off in toks:
        elements.append(_parse_element(tok, off, namer, sequential=True))
    for idx in (0, len(elements) - 1):
        if isinstance(elements[idx], Gap):
            raise QueryError(toks[idx][1], "gap-at-boundary",
                             "a gap cannot be the first or last element")
    if all(isinstance(e, Term) and e.optional for e in elements):
        raise QueryError(0, "all-optional", "all terms are optional")
    return SequentialQuery(elements=tuple(elements), context=context)


def parse_context(text: str, base: int = 0) -> ContextQuery:
    toks = _tokenize_context(text, base)
    if not toks:
        raise QueryError(base, "empty-context", "empty context query")
    clauses = []
    for tok, off in toks:
        m = _CONTEXT_CLAUSE_RE.match(tok)
        if not m:
            raise QueryError(off, "bad-clause",
                             "expected [+-]field:value, got %r" % tok)
        sign, fname, value = m.group(1), m.group(2), m.group(3)
        polarity = {"+": "must", "-": "must_not", None: "should"}[sign]
        voff = off + m.start(3)
        clauses.append(_parse_context_value(polarity, fname, value, voff))
    return ContextQuery(clauses=tuple(clauses))


def _parse_context_value(polarity, fname, value, off):
    rm = _RANGE_RE.match(value)
    if rm:
        if fname != "year":
            raise QueryError(off, "range-on-non-year",
                             "range values are only supported on year")
        try:
            low, high = int(rm.group(1)), int(rm.group(2))
        except ValueError:
            raise QueryError(off, "bad-range", "range bounds must be integers")
        if low > high:
            raise QueryError(off, "bad-range", "range low exceeds high")
        return ContextClause(polarity=polarity, field=fname, kind="range",
                             low=low, high=high)
    if value.startswith('"'):
        return ContextClause(polarity=polarity, field=fname, kind="phrase",
                             value=_unquote(value, off))
    if value.startswith("/") and value.endswith("/") and len(value) >= 2:
        pattern = value[1:-1]
        try:
            re.compile(pattern)
        except re.error as exc:
            raise QueryError(off, "bad-regex",
                             "invalid regular expression: %s" % exc)
        return ContextClause(polarity=polarity, field=fname, kind="regex",
                             value=pattern)
    if value.endswith("*") and len(value) > 1 and "*" not in value[:-1]:
        return ContextClause(polarity=polarity, field=fname, kind="prefix",
                             value=value[:-1])
    if fname == "year":
        try:
            int(value)
        except ValueError:
            raise QueryError(off, "bad-year", "year value must be an integer")
    return ContextClause(polarity=polarity, field=fname, kind="term",
                         value=value)


def _tokenize_context(text, base):
    """Like _tokenize but also keeps ``[a TO b]`` ranges together."""
    toks = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start = i
        in_quote = False
        in_bracket = 0
        while i < n and (in_quote or in_bracket or not text[i].isspace()):
            c = text[i]
            if c == '"':
                in_quote = not in_quote
            elif c == "\\" and in_quote and i + 1 < n:
                i += 1
            elif c == "[" and not in_quote:
                in_bracket += 1
            elif c == "]" and not in_quote and in_bracket:
                in_bracket -= 1
            i += 1
        if in_quote:
            raise QueryError(base + start, "unterminated-quote",
                             "unterminated double quote")
        toks.append((text[start:i], base + start))
    return toks


# ---------------------------------------------------------------------------
# rendering

def _quote(value):
    return '"%s"' % value.replace("\\", "\\\\").replace('"', '\\"')


def _needs_quotes(value, bare_word=False):
    if not value or _UNSAFE_VALUE_RE.search(value) or value.startswith("/"):
        return True
    if bare_word:
        # bare position: must not look like a wildcard, gap, or prefix mark
        if value == "*" or _GAP_RE.match(value) or value.startswith("?") \
                or value.startswith("<>"):
            return True
    return False


def _render_value(value, bare_word=False):
    return _quote(value) if _needs_quotes(value, bare_word) else value


def render_constraint(tc: TermConstraint, allow_bare=True):
    parts = []
    bare = (allow_bare and len(tc.conjuncts) == 1
            and tc.conjuncts[0].field == "word"
            and tc.conjuncts[0].regex is None)
    for fc in tc.conjuncts:
        if fc.regex is not None:
            body = "/%s/" % fc.regex
        else:
            body = "|".join(_render_value(v, bare_word=bare)
                            for v in fc.values)
        if bare:
            parts.append(body)
        else:
            parts.append("%s=%s" % (FIELD_ABBREV[fc.field], body))
    return "&".join(parts)


def _render_element(el):
    if isinstance(el, Wildcard):
        body = "*"
        prefix = "%s:" % el.capture if el.capture else ""
        return prefix + body
    if isinstance(el, Gap):
        body = "..." if el.max is None and el.min == 0 \
            else "...%d-%d..." % (el.min, el.max)
        prefix = "%s:" % el.capture if el.capture else ""
        return prefix + body
    if isinstance(el, Repetition):
        if (el.min, el.max) == (0, None):
            quant = "*"
        elif (el.min, el.max) == (1, None):
            quant = "+"
        elif (el.min, el.max) == (0, 1):
            quant = "?"
        else:
            quant = "{%d,%d}" % (el.min, el.max)
        return "[%s]%s" % (render_constraint(el.constraint, allow_bare=True),
                           quant)
    assert isinstance(el, Term)
    out = ""
    if el.optional:
        out += "?"
    if el.expand:
        out += "<>"
    if el.capture:
        out += "%s:" % el.capture
    return out + render_constraint(el.constraint)


def render_context_clause(cl: ContextClause):
    sign = {"must": "+", "must_not": "-", "should": ""}[cl.polarity]
    if cl.kind == "range":
        body = "[%d TO %d]" % (cl.low, cl.high)
    elif cl.kind == "phrase":
        body = _quote(cl.value)
    elif cl.kind == "regex":
        body = "/%s/" % cl.value
    elif cl.kind == "prefix":
        body = "%s*" % cl.value
    else:
        body = _quote(cl.value) if _needs_quotes(cl.value) \
            or cl.value.endswith("*") else cl.value
    return "%s%s:%s" % (sign, cl.field, body)


def render(query) -> str:
    if isinstance(query, ContextQuery):
        return " ".join(render_context_clause(c) for c in query.clauses)
    if isinstance(query, BooleanQuery):
        body = " ".join(_render_element(t) for t in query.terms)
    elif isinstance(query, SequentialQuery):
        body = " ".join(_render_element(e) for e in query.elements)
    else:
        raise TypeError("cannot render %r" % type(query))
    if query.context is not None:
        body += " #d " + render(query.context)
    return body
