"""
Shared test fixtures
====================
"""

import json
from pathlib import Path

import mpmath
import pytest

from utils.settings import working_precision

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def precision():
    """Every test runs at 128 bits and leaves the global precision as found"""
    with working_precision(128) as bits:
        yield bits


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def triangle_data() -> dict:
    return json.loads((FIXTURES / "triangular_band.json").read_text())


@pytest.fixture
def sim_data() -> dict:
    return json.loads((FIXTURES / "sim_example.json").read_text())


@pytest.fixture
def sqrt3():
    return mpmath.sqrt(3)


@pytest.fixture
def triangle():
    """The flat-folded four-triangle band at lambda = sqrt 3"""
    from utils.band import triangular_band
    return triangular_band()


@pytest.fixture(scope="session")
def sim():
    """(band, report) of the solved explicit band, built once per session"""
    from utils.example import build_sim
    with working_precision(128):
        return build_sim()
