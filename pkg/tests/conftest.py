import io
from pathlib import Path

import pytest

from morphoforge.builder import FilamentNetworkBuilder
from morphoforge.lexicon import load_lexicon, parse_lexicon

FIXTURES = Path(__file__).parent / "fixtures"

TOY_SETTINGS = dict(
    min_ngram=3, n_neighbors=100, w_threshold=3,
    cc_threshold=0.66, min_subseries=3, max_iterations=50,
)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def toy_lexicon():
    return load_lexicon(FIXTURES / "toy_lexicon.tsv")


@pytest.fixture(scope="session")
def gaz_lexicon():
    return load_lexicon(FIXTURES / "gazouillarde.tsv")


@pytest.fixture(scope="session")
def toy_builder(toy_lexicon):
    return FilamentNetworkBuilder(**TOY_SETTINGS).fit(toy_lexicon)


@pytest.fixture(scope="session")
def gaz_builder(gaz_lexicon):
    return FilamentNetworkBuilder(**TOY_SETTINGS).fit(gaz_lexicon)


def lexicon_from(text: str):
    return parse_lexicon(io.StringIO(text))
