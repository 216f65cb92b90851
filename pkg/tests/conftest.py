from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toydata import corpus_sentences, make_records

from postedit.baseline import BaselineBackend


@pytest.fixture(scope="session")
def toy_records() -> list[dict]:
    return make_records(12, seed=7)


@pytest.fixture(scope="session")
def toy_backend(toy_records) -> BaselineBackend:
    return BaselineBackend.from_corpus(corpus_sentences(toy_records))


@pytest.fixture(scope="session")
def tiny_backend() -> BaselineBackend:
    return BaselineBackend.from_corpus(["the cat sat", "the dog sat"])
