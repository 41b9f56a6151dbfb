"""Seeded random corpora and queries for oracle-equivalence testing."""

import random
import string

from exsearch.corpus import (
    AnnotatedSentence, Corpus, DocumentMeta, Token, validate_corpus,
)
from exsearch.queryast import (
    BooleanQuery, ContextClause, ContextQuery, FieldConstraint, Gap,
    QueryGraph, QueryGraphNode, Repetition, SequentialQuery, Term,
    TermConstraint, Wildcard,
)

WORDS = ["virus", "cell", "fatal", "infection", "stroke", "risk", "factor",
         "treat", "trial", "novel", "gene", "protein", "acute", "mild",
         "child", "the", "a", "of", "in", "and"]
TAGS = ["NN", "NNS", "JJ", "VB", "DT", "IN"]
ENTITIES = ["DISEASE", "SIMPLE_CHEMICAL", "GENE_OR_GENE_PRODUCT"]
DEP_LABELS = ["nsubj", "dobj", "amod", "nmod", "case", "det", "compound",
              "conj", "cc", "punct", "acl"]
MESH = ["Child", "Adult", "Infant", "Risk Factors", "Age Distribution"]
VENUES = ["Virology Letters", "Stroke Research", "Clinical Cases"]


def random_sentence(rng, sent_id, doc_id, paragraph_id):
    n = rng.randint(3, 10)
    words = [rng.choice(WORDS) for _ in range(n)]
    # sprinkle casing noise
    words = [w.capitalize() if rng.random() < 0.2 else w for w in words]
    tokens = []
    text_parts = []
    cursor = 0
    i = 0
    while i < n:
        entity = None
        length = 1
        if rng.random() < 0.25:
            entity = rng.choice(ENTITIES)
            length = min(rng.choice([1, 1, 2]), n - i)
        for k in range(length):
            word = words[i + k]
            lemma = word.lower().rstrip("s") or word.lower()
            tag = rng.choice(TAGS)
            role = None
            if entity:
                role = "B" if k == 0 else "I"
            start = cursor
            cursor += len(word)
            tokens.append(Token(word=word, lemma=lemma, tag=tag,
                                entity=entity, entity_role=role,
                                char_start=start, char_end=cursor))
            text_parts.append(word)
            cursor += 1  # following space
        i += length
    text = " ".join(text_parts)
    root = rng.randrange(n)
    edges = []
    order = list(range(n))
    rng.shuffle(order)
    attached = {root}
    for idx in order:
        if idx == root:
            continue
        head = rng.choice(sorted(attached))
        edges.append((head, idx, rng.choice(DEP_LABELS)))
        attached.add(idx)
    # occasional extra (enhanced) edge
    if n > 2 and rng.random() < 0.3:
        h, d = rng.sample(range(n), 2)
        if d != root:
            edges.append((h, d, rng.choice(DEP_LABELS)))
    return AnnotatedSentence(sent_id=sent_id, doc_id=doc_id,
                             paragraph_id=paragraph_id, text=text,
                             tokens=tokens, edges=edges, root=root)


def random_document(rng, doc_id):
    def blurb(k):
        return " ".join(rng.choice(WORDS) for _ in range(k))
    paragraphs = {"p%d" % i: blurb(8) for i in range(1, rng.randint(2, 4))}
    return DocumentMeta(
        doc_id=doc_id, title=blurb(5), abstract=blurb(12),
        authors=[rng.choice(["A. Smith", "B. Jones", "C. Chen"])
                 for _ in range(rng.randint(0, 2))],
        venue=rng.choice(VENUES),
        year=rng.choice([None, 2014, 2015, 2018, 2020, 2021]),
        mesh=rng.sample(MESH, rng.randint(0, 3)),
        paragraphs=paragraphs)


def random_corpus(rng, n_sentences=40, n_docs=5):
    docs = {("d%d" % i): random_document(rng, "d%d" % i)
            for i in range(n_docs)}
    sentences = []
    for i in range(n_sentences):
        doc_id = rng.choice(sorted(docs))
        pid = rng.choice(sorted(docs[doc_id].paragraphs))
        sentences.append(random_sentence(rng, "s%d" % i, doc_id, pid))
    corpus = Corpus(sentences=sentences, documents=docs)
    validate_corpus(corpus)
    return corpus


# ---------------------------------------------------------------------------
# random queries


def random_field_constraint(rng):
    roll = rng.random()
    if roll < 0.45:
        values = list(rng.sample(WORDS, rng.randint(1, 2)))
        if rng.random() < 0.2:
            values[0] = "%s %s" % (rng.choice(WORDS), rng.choice(WORDS))
        return FieldConstraint(field="word", values=tuple(values))
    if roll < 0.6:
        values = tuple({rng.choice(WORDS).lower().rstrip("s") or "x"
                        for _ in range(rng.randint(1, 2))})
        return FieldConstraint(field="lemma", values=values)
    if roll < 0.75:
        return FieldConstraint(field="tag",
                               values=(rng.choice(TAGS),))
    if roll < 0.9:
        return FieldConstraint(field="entity",
                               values=tuple(rng.sample(
                                   ENTITIES, rng.randint(1, 2))))
    prefix = rng.choice(["vir", "in", "tr", "st"])
    return FieldConstraint(field=rng.choice(["word", "lemma"]),
                           regex=prefix + ".*")


def random_constraint(rng):
    fcs = [random_field_constraint(rng)]
    if rng.random() < 0.2:
        other = random_field_constraint(rng)
        if other.field not in {fc.field for fc in fcs}:
            fcs.append(other)
    return TermConstraint(conjuncts=tuple(fcs))


def _names(rng, k):
    return rng.sample(list(string.ascii_lowercase), k)


def random_boolean_query(rng):
    n = rng.randint(1, 3)
    names = iter(_names(rng, n))
    terms = []
    for i in range(n):
        capture = next(names) if rng.random() < 0.6 else None
        terms.append(Term(
            constraint=random_constraint(rng),
            optional=(i > 0 and rng.random() < 0.25),
            capture=capture,
            expand=(capture is not None and rng.random() < 0.3)))
    if all(t.optional for t in terms):
        terms[0] = Term(constraint=terms[0].constraint, optional=False,
                        capture=terms[0].capture, expand=terms[0].expand)
    return BooleanQuery(terms=tuple(terms))


def random_seq_element(rng, name):
    roll = rng.random()
    if roll < 0.55:
        capture = name if rng.random() < 0.6 else None
        constraint = random_constraint(rng)
        return Term(constraint=constraint,
                    optional=rng.random() < 0.15,
                    capture=capture,
                    expand=(capture is not None and rng.random() < 0.2))
    if roll < 0.7:
        return Wildcard(capture=name if rng.random() < 0.4 else None)
    if roll < 0.85:
        if rng.random() < 0.3:
            lo, hi = 0, None
        else:
            lo = rng.randint(0, 2)
            hi = rng.choice([lo, lo + rng.randint(1, 2)])
        return Gap(min=lo, max=hi,
                   capture=name if rng.random() < 0.5 else None)
    lo = rng.randint(0, 1)
    hi = rng.choice([None, lo + 1, lo + 2])
    return Repetition(constraint=random_constraint(rng), min=lo, max=hi)


def random_sequential_query(rng):
    n = rng.randint(1, 4)
    names = iter(_names(rng, n))
    elements = [random_seq_element(rng, next(names)) for _ in range(n)]
    # gaps cannot sit at the boundaries; terms must not all be optional
    for idx in (0, -1):
        if isinstance(elements[idx], Gap):
            elements[idx] = Term(constraint=random_constraint(rng),
                                 capture=elements[idx].capture)
    if all(isinstance(e, Term) and e.optional for e in elements):
        first = elements[0]
        elements[0] = Term(constraint=first.constraint, optional=False,
                           capture=first.capture, expand=first.expand)
    return SequentialQuery(elements=tuple(elements))


def random_query_graph(rng):
    n = rng.randint(1, 4)
    names = iter(_names(rng, n))
    nodes = []
    for i in range(n):
        capture = next(names) if rng.random() < 0.6 else None
        constraint = random_constraint(rng) if rng.random() < 0.7 else None
        nodes.append(QueryGraphNode(
            id=i, constraint=constraint, capture=capture,
            expand=(capture is not None and rng.random() < 0.25)))
    edges = []
    for i in range(1, n):
        parent = rng.randrange(i)
        if rng.random() < 0.5:
            edges.append((parent, i, rng.choice(DEP_LABELS)))
        else:
            edges.append((i, parent, rng.choice(DEP_LABELS)))
    return QueryGraph(nodes=tuple(nodes), edges=tuple(edges))


def random_context_query(rng):
    n = rng.randint(1, 3)
    clauses = []
    for _ in range(n):
        polarity = rng.choice(["must", "must", "should", "must_not"])
        field = rng.choice(["title", "abstract", "paragraph", "authors",
                            "venue", "year", "mesh"])
        if field == "year":
            if rng.random() < 0.5:
                lo = rng.choice([2013, 2015, 2018])
                clauses.append(ContextClause(
                    polarity=polarity, field=field, kind="range",
                    low=lo, high=lo + rng.randint(0, 5)))
            else:
                clauses.append(ContextClause(
                    polarity=polarity, field=field, kind="term",
                    value=str(rng.choice([2014, 2018, 2020]))))
            continue
        kind = rng.choice(["term", "term", "phrase", "prefix", "regex"])
        if field in ("mesh", "venue") and kind == "phrase":
            value = rng.choice(MESH + VENUES)
        elif kind == "phrase":
            value = "%s %s" % (rng.choice(WORDS), rng.choice(WORDS))
        elif kind == "prefix":
            value = rng.choice(["vir", "ch", "ri", "st"])
        elif kind == "regex":
            value = rng.choice(["vir.*", ".*us", "ch.ld", "r.sk"])
        else:
            value = rng.choice(WORDS + ["A", "Smith"])
        clauses.append(ContextClause(polarity=polarity, field=field,
                                     kind=kind, value=value))
    return ContextQuery(clauses=tuple(clauses))
