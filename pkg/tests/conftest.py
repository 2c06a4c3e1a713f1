from pathlib import Path

import pytest

from entroconf.formats import load_artifact

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def log_e():
    return load_artifact(FIXTURES / "E.xes")


@pytest.fixture
def net_n():
    return load_artifact(FIXTURES / "N.pnml")


@pytest.fixture
def sdfa_a():
    return load_artifact(FIXTURES / "A.sdfa")
