import random

from exsearch.match import (
    EvalStats, eval_boolean, eval_sequential, eval_syntactic, evaluate,
    expand_capture,
)
from exsearch.index import build_index
from exsearch.oracle import oracle_eval
from exsearch.parser import parse_boolean, parse_sequential
from exsearch.qbe import compile_query, parse_markup

from randgen import (
    random_boolean_query, random_context_query, random_corpus,
    random_query_graph, random_sequential_query,
)


def run_boolean(index, text, **kw):
    return list(eval_boolean(index, parse_boolean(text), **kw))


def run_sequential(index, text, **kw):
    return list(eval_sequential(index, parse_sequential(text), **kw))


def run_syntactic(index, provider, text, **kw):
    graph = compile_query(parse_markup(text), provider)
    return list(eval_syntactic(index, graph, **kw))


def cap_texts(matches, name):
    return [m.captures[name].text for m in matches]


# ---------------------------------------------------------------------------
# boolean mode

def test_boolean_capture_per_mention(index):
    matches = run_boolean(index, "fatal asymptomatic d:e=DISEASE")
    assert [m.sent_id for m in matches] == ["s-fatal"] * 3
    assert cap_texts(matches, "d") == ["infection", "sepsis", "pneumonia"]


def test_boolean_mention_capture_spans_whole_mention(index):
    matches = run_boolean(index, "stroke r:e=DISEASE&w=Metabolic")
    assert cap_texts(matches, "r") == ["Metabolic syndrome"]


def test_boolean_optional_term(index):
    with_opt = run_boolean(index, "infection asymptomatic ?fatal")
    assert {m.sent_id for m in with_opt} == {"s-fatal"}
    # the optional term leaves matching sentences without it intact
    assert {m.sent_id for m in run_boolean(index, "infection ?asymptomatic")} \
        == {"s-fatal", "s-mild"}


def test_boolean_alternatives_and_conjunction(index):
    matches = run_boolean(index, "w=chloroquine|ribavirin l=treat&t=VBZ")
    assert [m.sent_id for m in matches] == ["s-chem"]


def test_boolean_case_insensitive_words_exact_tags(index):
    assert run_boolean(index, "w=erk") and run_boolean(index, "w=ERK")
    assert run_boolean(index, "t=NNP")
    assert not run_boolean(index, "t=nnp")


def test_boolean_regex(index):
    matches = run_boolean(index, "x:l=/phospho.*/")
    assert {m.sent_id for m in matches} == {"s-erk", "s-thrombo"}


def test_boolean_phrase_value(index):
    matches = run_boolean(index, 'p:"novel coronavirus"')
    assert cap_texts(matches, "p") == ["novel coronavirus"]


def test_boolean_disjoint_spans(index):
    # two capture terms with the same constraint must bind different tokens
    matches = run_boolean(index, "a:infection b:infection")
    assert matches == []


def test_boolean_expansion(index):
    matches = run_boolean(index, "<>inf:infection asymptomatic fatal")
    assert cap_texts(matches, "inf") == ["Asymptomatic infection"]


def test_boolean_expansion_contiguous_clip(index):
    matches = run_boolean(index, "<>c:infection developed")
    assert cap_texts(matches, "c") == ["a mild subclinical infection 9"]


def test_expansion_blocklist_stops_at_conj(index):
    sent = next(s for s in index.sentences() if s.sent_id == "s-fatal")
    # sepsis has a conj child (pneumonia); the expansion must not cross it
    span = expand_capture(sent, 6)
    assert span.text == "sepsis"


# ---------------------------------------------------------------------------
# sequential mode

def test_sequential_phrase(index):
    matches = run_sequential(index, "interspecies zoonotic")
    assert [m.sent_id for m in matches] == ["s-inter"]
    assert run_sequential(index, "zoonotic interspecies") == []


def test_sequential_gap_capture(index):
    matches = run_sequential(index,
                             "interspecies kind:...1-3... transmission")
    assert cap_texts(matches, "kind") == ["zoonotic"]


def test_sequential_preceding_tag(index):
    matches = run_sequential(index, "which:tag=NNS transmission")
    assert cap_texts(matches, "which") == ["diseases"]


def test_sequential_alias_pattern(index):
    matches = run_sequential(index,
                             "novel coronavirus ( alias:...1-2... )")
    assert cap_texts(matches, "alias") == ["nCov-19"]


def test_sequential_wildcard(index):
    matches = run_sequential(index, "novel * x:( ")
    assert cap_texts(matches, "x") == ["("]


def test_sequential_repetition(index):
    matches = run_sequential(index, "c:tag=DT [tag=JJ]* [tag=NN]+")
    # "a mild subclinical infection", "the novel coronavirus", ...
    assert {m.sent_id for m in matches} >= {"s-mild", "s-alias"}
    m_mild = [m for m in matches if m.sent_id == "s-mild"]
    assert cap_texts(m_mild, "c") == ["a"]


def test_sequential_entity_capture_widens_to_mention(index):
    matches = run_sequential(index, "for d:e=DISEASE cancer")
    assert cap_texts(matches, "d") == ["lung cancer"]


def test_sequential_optional_term(index):
    matches = run_sequential(index, "a ?w=mild subclinical")
    assert [m.sent_id for m in matches] == ["s-mild"]


# ---------------------------------------------------------------------------
# syntactic mode

FIG_QUERY = "<>p1:[e]BMP-6 $induces the $phosphorylation $of <>p2:Smad1"


def test_syntactic_reproduces_published_bindings(index, provider):
    matches = run_syntactic(index, provider, FIG_QUERY)
    got = {(m.sent_id, m.captures["p1"].text, m.captures["p2"].text)
           for m in matches}
    assert got == {
        ("s-erk", "ERK", "Elk-1"),
        ("s-thrombo", "Thrombopoietin", "p80/85 cortactin"),
    }


def test_syntactic_risk_factor_expansion(index, provider):
    plain = run_syntactic(index, provider,
                          "r:Diabetes is a $risk $factor for $stroke")
    assert cap_texts(plain, "r") == ["Hypertension", "syndrome"]
    expanded = run_syntactic(index, provider,
                             "<>r:Diabetes is a $risk $factor for $stroke")
    assert cap_texts(expanded, "r") == ["Hypertension", "Metabolic syndrome"]


def test_syntactic_entity_restriction_filters(index, provider):
    matches = run_syntactic(index, provider,
                            "$Smoking is a $risk $factor for d:[e]stroke")
    assert {(m.sent_id, m.captures["d"].text) for m in matches} == \
        {("s-smoking", "cancer")}


def test_syntactic_edge_labels_must_match(index, provider):
    from dataclasses import replace
    graph = compile_query(parse_markup(FIG_QUERY), provider)
    assert list(eval_syntactic(index, graph))
    # same nodes with one relabeled edge: the configuration no longer holds
    bad_edges = tuple((h, d, "amod") if lab == "nsubj" else (h, d, lab)
                      for h, d, lab in graph.edges)
    assert list(eval_syntactic(index, replace(graph, edges=bad_edges))) == []


# ---------------------------------------------------------------------------
# determinism, caps, stats

def test_results_are_deterministic(index, provider):
    for _ in range(3):
        a = run_boolean(index, "fatal asymptomatic d:e=DISEASE")
        b = run_boolean(index, "fatal asymptomatic d:e=DISEASE")
        assert [m.key() for m in a] == [m.key() for m in b]


def test_cap_truncates_and_prefixes(index):
    full = run_boolean(index, "a:e=DISEASE b:e=DISEASE")
    stats = EvalStats()
    capped = list(eval_boolean(index, parse_boolean("a:e=DISEASE b:e=DISEASE"),
                               cap=2, stats=stats))
    assert stats.truncated
    per_sent = {}
    for m in capped:
        per_sent.setdefault(m.ordinal, []).append(m.key())
    for ordinal, keys in per_sent.items():
        assert len(keys) <= 2
        full_keys = [m.key() for m in full if m.ordinal == ordinal]
        assert sorted(keys) == sorted(full_keys[:len(keys)]) or \
            set(keys) <= set(full_keys)


def test_stats_full_scan_flag(index):
    stats = EvalStats()
    list(eval_sequential(index, parse_sequential("x:* y:*"), stats=stats))
    assert stats.full_scan
    stats = EvalStats()
    list(eval_boolean(index, parse_boolean("fatal"), stats=stats))
    assert not stats.full_scan
    assert stats.candidates == 1


# ---------------------------------------------------------------------------
# random equivalence spot check (the acceptance suite runs the full sweep)

def test_oracle_spot_equivalence():
    rng = random.Random(555)
    for trial in range(25):
        corpus = random_corpus(rng, n_sentences=25, n_docs=4)
        index = build_index(corpus)
        for gen in (random_boolean_query, random_sequential_query,
                    random_query_graph):
            query = gen(rng)
            got = sorted(m.key() for m in evaluate(index, query))
            want = sorted(m.key() for m in oracle_eval(corpus, query))
            assert got == want
