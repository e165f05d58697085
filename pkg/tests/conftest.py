from pathlib import Path

import pytest

from ptmcat.taxonomy import load_default_taxonomy
from ptmcat.textprep import Normalizer

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def normalizer():
    return Normalizer()


@pytest.fixture(scope="session")
def taxonomy(normalizer):
    return load_default_taxonomy(normalizer)


@pytest.fixture(scope="session")
def snapshot_path():
    return FIXTURES / "snapshot_50.jsonl"
