import random
import sys

import pytest

from exsearch.corpus import AnnotatedSentence, Token
from exsearch.errors import SemanticError
from exsearch.qbe import (
    CommandParseProvider, FixtureParseProvider, Mark, MarkedSentence,
    compile_query, infer_restriction, parse_markup,
)
from exsearch.queryast import FieldConstraint, TermConstraint

from randgen import random_corpus

GENE = "GENE_OR_GENE_PRODUCT"


def word_c(value):
    return TermConstraint(conjuncts=(
        FieldConstraint(field="word", values=(value,)),))


def test_compile_inferred_entity(provider):
    graph = compile_query(parse_markup(
        "<>p1:[e]BMP-6 $induces the $phosphorylation $of <>p2:Smad1"),
        provider)
    assert [n.id for n in graph.nodes] == [0, 1, 3, 4, 5]
    by_id = {n.id: n for n in graph.nodes}
    assert by_id[0].capture == "p1" and by_id[0].expand
    assert by_id[0].constraint == TermConstraint(conjuncts=(
        FieldConstraint(field="entity", values=(GENE,)),))
    assert by_id[1].constraint == word_c("induces")
    assert by_id[3].constraint == word_c("phosphorylation")
    assert by_id[4].constraint == word_c("of")
    assert by_id[5].capture == "p2" and by_id[5].expand
    assert by_id[5].constraint is None
    assert set(graph.edges) == {(1, 0, "nsubj"), (1, 3, "dobj"),
                                (3, 4, "prep"), (4, 5, "pobj")}


def test_compile_explicit_restriction_equals_inferred(provider):
    inferred = compile_query(parse_markup(
        "<>p1:[e]BMP-6 $induces the $phosphorylation $of <>p2:Smad1"),
        provider)
    explicit = compile_query(parse_markup(
        "<>p1:[e=%s]BMP-6 $induces the $phosphorylation $of <>p2:Smad1"
        % GENE), provider)
    assert inferred == explicit


def test_compile_anchor_lemma_inference(provider):
    graph = compile_query(parse_markup(
        "<>p1:[e]BMP-6 $[l]induces the $phosphorylation $of <>p2:Smad1"),
        provider)
    by_id = {n.id: n for n in graph.nodes}
    assert by_id[1].constraint == TermConstraint(conjuncts=(
        FieldConstraint(field="lemma", values=("induce",)),))


def test_compile_drops_off_path_scaffolding(provider):
    graph = compile_query(parse_markup(
        "r:Diabetes is a $risk $factor for $stroke"), provider)
    # "is", "a", and "for" hang off the connecting paths and are dropped
    assert [n.id for n in graph.nodes] == [0, 3, 4, 6]
    by_id = {n.id: n for n in graph.nodes}
    assert by_id[0].capture == "r" and by_id[0].constraint is None
    assert set(graph.edges) == {(4, 0, "nsubj"), (4, 3, "compound"),
                                (4, 6, "nmod")}


def test_compile_keeps_on_path_scaffolding(provider):
    graph = compile_query(parse_markup(
        "$Smoking is a risk factor for $stroke"), provider)
    # "factor" joins the two anchors; it stays as an unconstrained node
    assert [n.id for n in graph.nodes] == [0, 4, 6]
    by_id = {n.id: n for n in graph.nodes}
    assert by_id[4].constraint is None and by_id[4].capture is None


def test_compile_context_carries_over(provider):
    graph = compile_query(parse_markup(
        "he was $treated $with a <>chem:treatment #d abstract:covid*"),
        provider)
    assert graph.context is not None
    assert graph.context.clauses[0].field == "abstract"


def test_compile_unknown_sentence(provider):
    with pytest.raises(SemanticError):
        compile_query(parse_markup("$no such sentence $here"), provider)


def test_compile_alignment_mismatch():
    sent = AnnotatedSentence(
        sent_id="x", doc_id="d", paragraph_id="", text="a b",
        tokens=[Token(word="a b", lemma="a b", tag="NN",
                      char_start=0, char_end=3)],
        edges=[], root=0)
    provider = FixtureParseProvider([sent])
    with pytest.raises(SemanticError) as exc:
        compile_query(parse_markup("$a b"), provider)
    assert "align" in str(exc.value)


def test_infer_restriction_missing_label(provider):
    with pytest.raises(SemanticError) as exc:
        compile_query(parse_markup(
            "he was treated with a d:[e]treatment"), provider)
    assert "entity" in str(exc.value)


def test_infer_restriction_direct():
    tok = Token(word="BMP-6", lemma="bmp-6", tag="NNP", entity=GENE,
                entity_role="B", char_start=0, char_end=5)
    assert infer_restriction("entity", tok) == TermConstraint(conjuncts=(
        FieldConstraint(field="entity", values=(GENE,)),))
    assert infer_restriction("lemma", tok) == TermConstraint(conjuncts=(
        FieldConstraint(field="lemma", values=("bmp-6",)),))


# ---------------------------------------------------------------------------
# Steiner-subtree property on random parses

def _basic_adjacency(sent):
    head_of = {}
    for head, dep, _label in sent.edges:
        if dep not in head_of and dep != sent.root:
            head_of[dep] = head
    adj = {i: set() for i in range(len(sent.tokens))}
    for dep, head in head_of.items():
        adj[dep].add(head)
        adj[head].add(dep)
    return adj


def test_compiled_subtree_is_minimal_and_connected():
    """Node set must be the Steiner subtree of the marked tokens.

    On a tree that set is characterized by: contains the marked tokens,
    induces a connected subgraph, and every leaf of the induced subgraph
    is marked.
    """
    rng = random.Random(99)
    checked = 0
    while checked < 120:
        corpus = random_corpus(rng, n_sentences=6, n_docs=2)
        for sent in corpus.sentences:
            n = len(sent.tokens)
            k = rng.randint(1, min(4, n))
            marked = sorted(rng.sample(range(n), k))
            marks = []
            cap = 0
            for i in range(n):
                if i not in marked:
                    marks.append(Mark(kind="scaffold"))
                elif rng.random() < 0.5:
                    marks.append(Mark(kind="anchor"))
                else:
                    cap += 1
                    marks.append(Mark(kind="capture", name="c%d" % cap))
            marked_sent = MarkedSentence(
                plain_text=sent.text,
                words=tuple(t.word for t in sent.tokens),
                marks=tuple(marks))
            provider = FixtureParseProvider([sent])
            graph = compile_query(marked_sent, provider)
            keep = {node.id for node in graph.nodes}
            assert set(marked) <= keep
            adj = _basic_adjacency(sent)
            # connected
            seen = {min(keep)}
            stack = [min(keep)]
            while stack:
                for nb in adj[stack.pop()] & keep:
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            assert seen == keep
            # minimal: unmarked leaves would be removable
            for node in keep:
                if len(adj[node] & keep) <= 1 and len(keep) > 1:
                    assert node in marked
            # edges are exactly the induced basic-tree edges
            for head, dep, _label in graph.edges:
                assert head in keep and dep in keep
                assert dep in adj[head]
            checked += 1


# ---------------------------------------------------------------------------
# external annotator adapter

ANNOTATOR = r"""
import json, sys
text = sys.stdin.read().strip()
words = text.split()
tokens = []
pos = 0
for w in words:
    start = text.index(w, pos)
    pos = start + len(w)
    tokens.append({"word": w, "lemma": w.lower(), "tag": "NN",
                   "entity": None, "char_start": start, "char_end": pos})
edges = [[i - 1, i, "dep"] for i in range(1, len(words))]
print(json.dumps({"sent_id": "cmd", "doc_id": "cmd", "paragraph_id": "",
                  "text": text, "tokens": tokens, "edges": edges,
                  "root": 0}))
"""


def test_command_provider():
    provider = CommandParseProvider([sys.executable, "-c", ANNOTATOR])
    graph = compile_query(parse_markup("$alpha beta c:gamma"), provider)
    assert [n.id for n in graph.nodes] == [0, 1, 2]
    by_id = {n.id: n for n in graph.nodes}
    assert by_id[0].constraint == word_c("alpha")
    assert by_id[1].constraint is None
    assert by_id[2].capture == "c"


def test_command_provider_failure():
    provider = CommandParseProvider(
        [sys.executable, "-c", "import sys; sys.exit(3)"])
    with pytest.raises(SemanticError):
        compile_query(parse_markup("$a b"), provider)
