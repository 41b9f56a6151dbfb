"""Annotated-corpus data model, JSONL interchange ingestion, lexicon re-tagging.

The interchange format is line-delimited JSON (UTF-8), one record per line.
Each record carries ``"kind": "sentence"`` or ``"kind": "document"``; the
full field inventory is documented in docs/corpus-format.md and mirrored by
the JSON Schema in docs/corpus-schema.json.
"""

import json
from dataclasses import dataclass, field, replace

import jsonschema

from .errors import CorpusError

ENTITY_BEGIN = "B"
ENTITY_INSIDE = "I"

_TOKEN_SCHEMA = {
    "type": "object",
    "required": ["word", "lemma", "tag", "char_start", "char_end"],
    "properties": {
        "word": {"type": "string", "minLength": 1},
        "lemma": {"type": "string", "minLength": 1},
        "tag": {"type": "string", "minLength": 1},
        "entity": {"type": ["string", "null"], "pattern": "^[BI]-.+"},
        "char_start": {"type": "integer", "minimum": 0},
        "char_end": {"type": "integer", "minimum": 1},
    },
}

SENTENCE_SCHEMA = {
    "type": "object",
    "required": ["kind", "sent_id", "doc_id", "text", "tokens", "edges",
                 "root"],
    "properties": {
        "kind": {"const": "sentence"},
        "sent_id": {"type": "string", "minLength": 1},
        "doc_id": {"type": "string", "minLength": 1},
        "paragraph_id": {"type": "string"},
        "text": {"type": "string"},
        "tokens": {"type": "array", "minItems": 1, "items": _TOKEN_SCHEMA},
        "edges": {"type": "array",
                  "items": {"type": "array", "minItems": 3, "maxItems": 3}},
        "root": {"type": "integer", "minimum": 0},
    },
}

DOCUMENT_SCHEMA = {
    "type": "object",
    "required": ["kind", "doc_id"],
    "properties": {
        "kind": {"const": "document"},
        "doc_id": {"type": "string", "minLength": 1},
        "title": {"type": "string"},
        "abstract": {"type": "string"},
        "authors": {"type": "array", "items": {"type": "string"}},
        "venue": {"type": "string"},
        "year": {"type": ["integer", "null"]},
        "mesh": {"type": "array", "items": {"type": "string"}},
        "paragraphs": {"type": "object",
                       "additionalProperties": {"type": "string"}},
    },
}


def check_record(rec):
    """Structural (JSON Schema) validation of one interchange record."""
    if not isinstance(rec, dict):
        raise CorpusError("record is not a JSON object")
    kind = rec.get("kind")
    if kind == "sentence":
        schema = SENTENCE_SCHEMA
    elif kind == "document":
        schema = DOCUMENT_SCHEMA
    else:
        raise CorpusError("unknown record kind %r" % kind)
    try:
        jsonschema.validate(rec, schema)
    except jsonschema.ValidationError as exc:
        raise CorpusError("schema violation: %s" % exc.message)


@dataclass(frozen=True)
class Token:
    word: str
    lemma: str
    tag: str
    entity: str | None = None  # mention label, e.g. "DISEASE"
    entity_role: str | None = None  # ENTITY_BEGIN or ENTITY_INSIDE
    char_start: int = 0
    char_end: int = 0


@dataclass
class AnnotatedSentence:
    sent_id: str
    doc_id: str
    paragraph_id: str
    text: str
    tokens: list[Token]
    # (head index, dependent index, relation label); multiple heads permitted
    edges: list[tuple[int, int, str]]
    root: int

    def mentions(self):
        """Maximal contiguous entity-mention runs as (start, end, label)."""
        out = []
        i = 0
        n = len(self.tokens)
        while i < n:
            tok = self.tokens[i]
            if tok.entity is not None and tok.entity_role == ENTITY_BEGIN:
                j = i + 1
                while (j < n and self.tokens[j].entity == tok.entity
                       and self.tokens[j].entity_role == ENTITY_INSIDE):
                    j += 1
                out.append((i, j - 1, tok.entity))
                i = j
            else:
                i += 1
        return out

    def basic_children(self):
        """Children lists of the basic tree (first-listed head per token)."""
        head_of = {}
        for head, dep, _label in self.edges:
            if dep not in head_of and dep != self.root:
                head_of[dep] = head
        children = [[] for _ in self.tokens]
        for dep, head in head_of.items():
            children[head].append(dep)
        for ch in children:
            ch.sort()
        return children


@dataclass
class DocumentMeta:
    doc_id: str
    title: str = ""
    abstract: str = ""
    authors: list[str] = field(default_factory=list)
    venue: str = ""
    year: int | None = None
    mesh: list[str] = field(default_factory=list)
    paragraphs: dict[str, str] = field(default_factory=dict)


@dataclass
class Corpus:
    sentences: list[AnnotatedSentence]
    documents: dict[str, DocumentMeta]


# ---------------------------------------------------------------------------
# validation

def validate_sentence(sent: AnnotatedSentence):
    n = len(sent.tokens)
    if n == 0:
        raise CorpusError("sentence %r has no tokens" % sent.sent_id)
    prev_end = -1
    for i, tok in enumerate(sent.tokens):
        if tok.char_start >= tok.char_end:
            raise CorpusError(
                "token %d of %r: empty character span" % (i, sent.sent_id))
        if tok.char_start < prev_end:
            raise CorpusError(
                "token %d of %r: overlapping or unordered character span"
                % (i, sent.sent_id))
        if tok.char_end > len(sent.text):
            raise CorpusError(
                "token %d of %r: span exceeds sentence text" % (i, sent.sent_id))
        if sent.text[tok.char_start:tok.char_end] != tok.word:
            raise CorpusError(
                "token %d of %r: word does not match text span" % (i, sent.sent_id))
        if (tok.entity is None) != (tok.entity_role is None):
            raise CorpusError(
                "token %d of %r: entity label and role must come together"
                % (i, sent.sent_id))
        if tok.entity_role not in (None, ENTITY_BEGIN, ENTITY_INSIDE):
            raise CorpusError(
                "token %d of %r: bad entity role %r"
                % (i, sent.sent_id, tok.entity_role))
        if tok.entity_role == ENTITY_INSIDE:
            prev = sent.tokens[i - 1] if i else None
            if prev is None or prev.entity != tok.entity:
                raise CorpusError(
                    "token %d of %r: inside-role token without matching "
                    "predecessor" % (i, sent.sent_id))
        prev_end = tok.char_end
    if not (0 <= sent.root < n):
        raise CorpusError("invalid root index in %r" % sent.sent_id)
    for head, dep, label in sent.edges:
        if not (0 <= head < n and 0 <= dep < n):
            raise CorpusError(
                "invalid edge index (%d, %d) in %r" % (head, dep, sent.sent_id))
        if not label:
            raise CorpusError("empty edge label in %r" % sent.sent_id)
    # connectivity: every token reachable from the root
    adj = [[] for _ in range(n)]
    for head, dep, _label in sent.edges:
        adj[head].append(dep)
    seen = {sent.root}
    stack = [sent.root]
    while stack:
        for dep in adj[stack.pop()]:
            if dep not in seen:
                seen.add(dep)
                stack.append(dep)
    if len(seen) != n:
        raise CorpusError(
            "dependency graph of %r not connected from root" % sent.sent_id)


def validate_document(doc: DocumentMeta):
    if not doc.doc_id:
        raise CorpusError("document with empty doc_id")
    if doc.year is not None and doc.year < 0:
        raise CorpusError("document %r: negative year" % doc.doc_id)


def validate_corpus(corpus: Corpus):
    seen_ids = set()
    for sent in corpus.sentences:
        validate_sentence(sent)
        if sent.sent_id in seen_ids:
            raise CorpusError("duplicate sent_id %r" % sent.sent_id)
        seen_ids.add(sent.sent_id)
        doc = corpus.documents.get(sent.doc_id)
        if doc is None:
            raise CorpusError(
                "sentence %r references unknown doc_id %r"
                % (sent.sent_id, sent.doc_id))
        if sent.paragraph_id and sent.paragraph_id not in doc.paragraphs:
            raise CorpusError(
                "sentence %r references unknown paragraph %r of %r"
                % (sent.sent_id, sent.paragraph_id, sent.doc_id))
    for doc in corpus.documents.values():
        validate_document(doc)


# ---------------------------------------------------------------------------
# (de)serialization

def _entity_tag(tok: Token):
    if tok.entity is None:
        return None
    return "%s-%s" % (tok.entity_role, tok.entity)


def _split_entity_tag(tag):
    if tag is None:
        return None, None
    role, sep, label = tag.partition("-")
    if role not in (ENTITY_BEGIN, ENTITY_INSIDE) or not sep or not label:
        raise CorpusError("bad entity tag %r" % tag)
    return label, role


def token_to_record(tok: Token):
    return {
        "word": tok.word,
        "lemma": tok.lemma,
        "tag": tok.tag,
        "entity": _entity_tag(tok),
        "char_start": tok.char_start,
        "char_end": tok.char_end,
    }


def sentence_to_record(sent: AnnotatedSentence):
    return {
        "kind": "sentence",
        "sent_id": sent.sent_id,
        "doc_id": sent.doc_id,
        "paragraph_id": sent.paragraph_id,
        "text": sent.text,
        "tokens": [token_to_record(t) for t in sent.tokens],
        "edges": [[h, d, lab] for h, d, lab in sent.edges],
        "root": sent.root,
    }


def document_to_record(doc: DocumentMeta):
    return {
        "kind": "document",
        "doc_id": doc.doc_id,
        "title": doc.title,
        "abstract": doc.abstract,
        "authors": doc.authors,
        "venue": doc.venue,
        "year": doc.year,
        "mesh": doc.mesh,
        "paragraphs": doc.paragraphs,
    }


def sentence_from_record(rec) -> AnnotatedSentence:
    try:
        tokens = []
        for t in rec["tokens"]:
            label, role = _split_entity_tag(t.get("entity"))
            tokens.append(Token(
                word=t["word"], lemma=t["lemma"], tag=t["tag"],
                entity=label, entity_role=role,
                char_start=int(t["char_start"]), char_end=int(t["char_end"])))
        edges = [(int(h), int(d), str(lab)) for h, d, lab in rec["edges"]]
        return AnnotatedSentence(
            sent_id=str(rec["sent_id"]), doc_id=str(rec["doc_id"]),
            paragraph_id=str(rec.get("paragraph_id", "")),
            text=rec["text"], tokens=tokens, edges=edges,
            root=int(rec["root"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError("malformed sentence record: %s" % exc)


def document_from_record(rec) -> DocumentMeta:
    try:
        year = rec.get("year")
        return DocumentMeta(
            doc_id=str(rec["doc_id"]),
            title=str(rec.get("title", "")),
            abstract=str(rec.get("abstract", "")),
            authors=[str(a) for a in rec.get("authors", [])],
            venue=str(rec.get("venue", "")),
            year=None if year is None else int(year),
            mesh=[str(m) for m in rec.get("mesh", [])],
            paragraphs={str(k): str(v)
                        for k, v in rec.get("paragraphs", {}).items()})
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError("malformed document record: %s" % exc)


def load_corpus(path) -> Corpus:
    """Load and validate a corpus; any invalid record fails the whole load."""
    sentences = []
    documents = {}
    sent_lines = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError("invalid JSON: %s" % exc, line=lineno)
            kind = rec.get("kind") if isinstance(rec, dict) else None
            try:
                check_record(rec)
                if kind == "sentence":
                    sent = sentence_from_record(rec)
                    validate_sentence(sent)
                    if sent.sent_id in sent_lines:
                        raise CorpusError(
                            "duplicate sent_id %r (first at line %d)"
                            % (sent.sent_id, sent_lines[sent.sent_id]))
                    sent_lines[sent.sent_id] = lineno
                    sentences.append((lineno, sent))
                elif kind == "document":
                    doc = document_from_record(rec)
                    validate_document(doc)
                    if doc.doc_id in documents:
                        raise CorpusError("duplicate doc_id %r" % doc.doc_id)
                    documents[doc.doc_id] = doc
                else:
                    raise CorpusError("unknown record kind %r" % kind)
            except CorpusError as exc:
                if exc.line is None:
                    raise CorpusError(exc.message, line=lineno)
                raise
    for lineno, sent in sentences:
        doc = documents.get(sent.doc_id)
        if doc is None:
            raise CorpusError(
                "sentence %r references unknown doc_id %r"
                % (sent.sent_id, sent.doc_id), line=lineno)
        if sent.paragraph_id and sent.paragraph_id not in doc.paragraphs:
            raise CorpusError(
                "sentence %r references unknown paragraph %r"
                % (sent.sent_id, sent.paragraph_id), line=lineno)
    return Corpus(sentences=[s for _, s in sentences], documents=documents)


def save_corpus(corpus: Corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id in sorted(corpus.documents):
            fh.write(json.dumps(document_to_record(corpus.documents[doc_id]),
                                ensure_ascii=False) + "\n")
        for sent in corpus.sentences:
            fh.write(json.dumps(sentence_to_record(sent),
                                ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# lexicon re-tagging

def apply_entity_lexicon(corpus: Corpus, lexicon, type_name: str) -> Corpus:
    """Tag every maximal token-aligned occurrence of a lexicon entry.

    Matching is case-insensitive on surface forms; longer entries win over
    shorter overlapping ones, leftmost-first on ties. Returns a new corpus;
    the input is left untouched.
    """
    if not lexicon:
        raise ValueError("empty lexicon")
    if not type_name:
        raise ValueError("empty entity type name")
    entries = []
    for entry in lexicon:
        parts = tuple(w.lower() for w in entry.split())
        if not parts:
            raise ValueError("empty lexicon entry %r" % entry)
        entries.append(parts)
    new_sentences = []
    for sent in corpus.sentences:
        words = [t.word.lower() for t in sent.tokens]
        hits = []
        for parts in entries:
            k = len(parts)
            for i in range(len(words) - k + 1):
                if tuple(words[i:i + k]) == parts:
                    hits.append((i, i + k - 1))
        if not hits:
            new_sentences.append(sent)
            continue
        hits.sort(key=lambda h: (-(h[1] - h[0]), h[0]))
        taken = []
        occupied = set()
        for start, end in hits:
            span = set(range(start, end + 1))
            if span & occupied:
                continue
            taken.append((start, end))
            occupied |= span
        tokens = list(sent.tokens)
        for start, end in taken:
            for i in range(start, end + 1):
                role = ENTITY_BEGIN if i == start else ENTITY_INSIDE
                tokens[i] = replace(tokens[i], entity=type_name,
                                    entity_role=role)
        # repair mention chains broken by partial overwrites
        for i, tok in enumerate(tokens):
            if tok.entity_role == ENTITY_INSIDE:
                prev = tokens[i - 1] if i else None
                if prev is None or prev.entity != tok.entity:
                    tokens[i] = replace(tok, entity_role=ENTITY_BEGIN)
        new_sentences.append(replace(sent, tokens=tokens))
    return Corpus(sentences=new_sentences, documents=corpus.documents)
