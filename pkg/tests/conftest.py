import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quotsing.resolve.ext import ExtEngine  # noqa: E402
from quotsing.weights import parse_group  # noqa: E402

Z3 = "m=3:a=1,1,1"
Z5 = "m=5:a=1,2,2"
Z4 = "m=4:a=1,3"


@pytest.fixture(scope="session")
def z3():
    return parse_group(Z3)


@pytest.fixture(scope="session")
def z5():
    return parse_group(Z5)


@pytest.fixture(scope="session")
def z4():
    return parse_group(Z4)


@pytest.fixture(scope="session")
def z3_engine(z3):
    return ExtEngine(z3)


@pytest.fixture(scope="session")
def z4_engine(z4):
    return ExtEngine(z4)
