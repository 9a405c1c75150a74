"""Shared fixtures: the frozen 200-document corpus and views over it."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from newsgraph.engine import TopicEngine
from oracle import Oracle
from _synth import build_store, parse_records

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def corpus_records_200() -> list[dict]:
    path = FIXTURES / "corpus_200.jsonl"
    return [json.loads(line) for line in path.read_text().splitlines() if line]


@pytest.fixture(scope="session")
def docs_200(corpus_records_200):
    return parse_records(corpus_records_200)


@pytest.fixture(scope="session")
def store_200(corpus_records_200):
    return build_store(corpus_records_200)


@pytest.fixture(scope="session")
def index_200(store_200):
    return store_200.index()


@pytest.fixture(scope="session")
def oracle_200(docs_200):
    return Oracle(docs_200)


@pytest.fixture()
def engine_200(index_200):
    return TopicEngine(index_200)
