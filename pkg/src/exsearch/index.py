"""Positional inverted index, document-field index, and persistence.

The index is write-once: it is built from a corpus in one pass and never
mutated afterwards, which makes it safe for unbounded concurrent readers.
Re-tagging a corpus requires a rebuild.
"""

import pickle
import re
import struct
import uuid

from .corpus import Corpus
from .errors import IndexFormatError
from .queryast import CASE_FOLDED_FIELDS, FIELDS

FORMAT_VERSION = 1
_MAGIC = b"EXSIDX"

_WORD_RE = re.compile(r"\w+")


def fold(field, value):
    return value.lower() if field in CASE_FOLDED_FIELDS else value


def field_tokens(text):
    """Case-folded word tokens of a metadata field."""
    return _WORD_RE.findall(text.lower())


class Index:
    def __init__(self, corpus: Corpus):
        self.version = "%d-%s" % (FORMAT_VERSION, uuid.uuid4().hex[:12])
        self._sentences = list(corpus.sentences)
        self._docs = dict(corpus.documents)
        self._postings = {f: {} for f in FIELDS}
        for ordinal, sent in enumerate(self._sentences):
            for pos, tok in enumerate(sent.tokens):
                self._add(self._postings["word"], fold("word", tok.word),
                          ordinal, pos)
                self._add(self._postings["lemma"], fold("lemma", tok.lemma),
                          ordinal, pos)
                self._add(self._postings["tag"], tok.tag, ordinal, pos)
                if tok.entity is not None:
                    self._add(self._postings["entity"], tok.entity,
                              ordinal, pos)
        # document-field token streams and whole-string maps
        self._doc_tokens = {"title": {}, "abstract": {}, "authors": {}}
        self._whole = {"mesh": {}, "venue": {}}
        self._years = {}
        self._paragraph_tokens = {}
        for doc_id, doc in self._docs.items():
            self._doc_tokens["title"][doc_id] = field_tokens(doc.title)
            self._doc_tokens["abstract"][doc_id] = field_tokens(doc.abstract)
            self._doc_tokens["authors"][doc_id] = field_tokens(
                " ".join(doc.authors))
            self._whole["mesh"][doc_id] = [m.lower() for m in doc.mesh]
            self._whole["venue"][doc_id] = [doc.venue.lower()] \
                if doc.venue else []
            if doc.year is not None:
                self._years[doc_id] = doc.year
            for pid, text in doc.paragraphs.items():
                self._paragraph_tokens[(doc_id, pid)] = field_tokens(text)

    @staticmethod
    def _add(table, value, ordinal, pos):
        table.setdefault(value, []).append((ordinal, pos))

    # -- sentence / document stores -------------------------------------

    def __len__(self):
        return len(self._sentences)

    def sentence(self, ordinal):
        return self._sentences[ordinal]

    def sentences(self):
        return self._sentences

    def document(self, doc_id):
        return self._docs[doc_id]

    def documents(self):
        return self._docs

    def postings(self, field, value):
        return self._postings[field].get(fold(field, value), [])

    def term_dictionary(self, field):
        return self._postings[field].keys()

    # -- candidate generation -------------------------------------------

    def all_ordinals(self):
        return set(range(len(self._sentences)))

    def candidates(self, constraints):
        """Sound superset of sentences that can satisfy all constraints.

        Per-constraint postings unions are intersected; regexes are resolved
        by scanning the term dictionary; unconstrained entries contribute
        all sentences.
        """
        result = None
        for tc in constraints:
            tc_set = None
            for fc in tc.conjuncts:
                if fc.regex is not None:
                    flags = re.IGNORECASE if fc.field in CASE_FOLDED_FIELDS \
                        else 0
                    pattern = re.compile(fc.regex, flags)
                    values = [v for v in self._postings[fc.field]
                              if pattern.fullmatch(v)]
                else:
                    values = [fold(fc.field, v) for v in fc.values]
                fc_set = set()
                for value in values:
                    if fc.field == "word" and " " in value:
                        # multi-word phrase value: every word must occur
                        sub = None
                        for w in value.split():
                            wset = {o for o, _p in
                                    self._postings["word"].get(w, [])}
                            sub = wset if sub is None else (sub & wset)
                        fc_set |= sub if sub is not None else set()
                    else:
                        fc_set |= {o for o, _p in
                                   self._postings[fc.field].get(value, [])}
                tc_set = fc_set if tc_set is None else (tc_set & fc_set)
            if tc_set is None:
                tc_set = self.all_ordinals()
            result = tc_set if result is None else (result & tc_set)
        if result is None:
            result = self.all_ordinals()
        return result

    # -- contextual restrictions ----------------------------------------

    def doc_filter(self, ctx):
        return DocFilter(self, ctx)


def _tokens_satisfy(tokens, clause):
    if clause.kind == "term":
        return clause.value.lower() in tokens
    if clause.kind == "phrase":
        phrase = field_tokens(clause.value)
        if not phrase:
            return False
        k = len(phrase)
        return any(tokens[i:i + k] == phrase
                   for i in range(len(tokens) - k + 1))
    if clause.kind == "prefix":
        prefix = clause.value.lower()
        return any(t.startswith(prefix) for t in tokens)
    if clause.kind == "regex":
        pattern = re.compile(clause.value, re.IGNORECASE)
        return any(pattern.fullmatch(t) for t in tokens)
    raise ValueError("range clause on token field")


def _strings_satisfy(values, clause):
    if clause.kind == "term":
        return clause.value.lower() in values
    if clause.kind == "phrase":
        return clause.value.lower() in values
    # prefix and regex evaluate over the token stream of the strings
    tokens = [t for v in values for t in field_tokens(v)]
    return _tokens_satisfy(tokens, clause)


def clause_satisfied(index: Index, clause, doc_id, paragraph_id):
    """Whether one context clause holds for a sentence's doc / paragraph."""
    if clause.field == "year":
        year = index._years.get(doc_id)
        if year is None:
            return False
        if clause.kind == "range":
            return clause.low <= year <= clause.high
        return year == int(clause.value)
    if clause.field == "paragraph":
        tokens = index._paragraph_tokens.get((doc_id, paragraph_id))
        if tokens is None:
            return False
        return _tokens_satisfy(tokens, clause)
    if clause.field in ("mesh", "venue"):
        return _strings_satisfy(index._whole[clause.field].get(doc_id, []),
                                clause)
    return _tokens_satisfy(index._doc_tokens[clause.field].get(doc_id, []),
                           clause)


class DocFilter:
    """must / must_not / should evaluation of a context query.

    Paragraph clauses are evaluated against the sentence's own paragraph;
    all other clauses are document-level and memoized per document.
    """

    def __init__(self, index: Index, ctx):
        self.index = index
        self.ctx = ctx
        self._cache = {}

    def admits(self, doc_id, paragraph_id):
        has_par = any(c.field == "paragraph" for c in self.ctx.clauses)
        key = (doc_id, paragraph_id if has_par else None)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._evaluate(doc_id, paragraph_id)
            self._cache[key] = hit
        return hit

    def _evaluate(self, doc_id, paragraph_id):
        any_should = False
        should_ok = False
        for clause in self.ctx.clauses:
            sat = clause_satisfied(self.index, clause, doc_id, paragraph_id)
            if clause.polarity == "must":
                if not sat:
                    return False
            elif clause.polarity == "must_not":
                if sat:
                    return False
            else:
                any_should = True
                should_ok = should_ok or sat
        return should_ok or not any_should

    def doc_ids(self, paragraph_id=""):
        return {d for d in self.index.documents()
                if self.admits(d, paragraph_id)}


# ---------------------------------------------------------------------------
# persistence

def build_index(corpus: Corpus) -> Index:
    return Index(corpus)


def save_index(index: Index, path):
    payload = pickle.dumps(index, protocol=pickle.HIGHEST_PROTOCOL)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(payload)))
        fh.write(payload)


def load_index(path) -> Index:
    try:
        with open(path, "rb") as fh:
            magic = fh.read(len(_MAGIC))
            if magic != _MAGIC:
                raise IndexFormatError("%s: not an index file" % path)
            header = fh.read(12)
            if len(header) < 12:
                raise IndexFormatError("%s: truncated index header" % path)
            version, = struct.unpack("<I", header[:4])
            if version != FORMAT_VERSION:
                raise IndexFormatError(
                    "%s: index format version %d, expected %d"
                    % (path, version, FORMAT_VERSION))
            size, = struct.unpack("<Q", header[4:])
            payload = fh.read(size)
            if len(payload) < size:
                raise IndexFormatError("%s: truncated index file" % path)
            try:
                index = pickle.loads(payload)
            except Exception as exc:
                raise IndexFormatError("%s: corrupt index payload (%s)"
                                       % (path, exc))
    except OSError as exc:
        raise IndexFormatError("cannot read index: %s" % exc)
    if not isinstance(index, Index):
        raise IndexFormatError("%s: corrupt index payload" % path)
    return index
