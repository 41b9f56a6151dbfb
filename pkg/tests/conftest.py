import json

import pytest

from exsearch.corpus import save_corpus, sentence_to_record
from exsearch.index import build_index
from exsearch.qbe import FixtureParseProvider

from corpusdata import fixture_corpus, fixture_parses


@pytest.fixture(scope="session")
def corpus():
    return fixture_corpus()


@pytest.fixture(scope="session")
def index(corpus):
    return build_index(corpus)


@pytest.fixture(scope="session")
def provider():
    return FixtureParseProvider(fixture_parses())


@pytest.fixture(scope="session")
def corpus_path(corpus, tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "corpus.jsonl"
    save_corpus(corpus, path)
    return path


@pytest.fixture(scope="session")
def parses_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "parses.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for sent in fixture_parses():
            fh.write(json.dumps(sentence_to_record(sent)) + "\n")
    return path
