import os

import numpy as np
import pytest

from imexrelax.tableau import get_scheme, parse_registry

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def euler():
    return get_scheme("imex-euler")


@pytest.fixture(scope="session")
def mtrap():
    return get_scheme("imex-midpoint-trapezoid")


@pytest.fixture(scope="session")
def fixture_schemes():
    with open(os.path.join(FIXTURES, "transcribed_schemes.txt")) as fh:
        return parse_registry(fh.read())


@pytest.fixture()
def rng():
    return np.random.default_rng(0)


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)
