import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qsci.integrals import read_fcidump

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def h2_ints():
    return read_fcidump(DATA / "h2_sto3g.fcidump")


@pytest.fixture(scope="session")
def h2o_ints():
    return read_fcidump(DATA / "h2o_6e5o_sto3g.fcidump")


@pytest.fixture(scope="session")
def benzene_ints():
    return read_fcidump(DATA / "benzene_6e6o_sto3g.fcidump")


@pytest.fixture(scope="session")
def data_dir():
    return DATA
