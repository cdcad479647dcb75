import pathlib

import pytest

from prmukit import corpus as corpus_mod

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sample_corpus():
    return corpus_mod.load_corpus(DATA_DIR / "sample_doc.jsonl")


@pytest.fixture(scope="session")
def sample_doc(sample_corpus):
    return sample_corpus.documents[0]
