import sys
from pathlib import Path

import numpy as np
import pytest

# The application is run from app/ and imports its packages flat.
APP_DIR = Path(__file__).resolve().parent.parent
if str(APP_DIR) not in sys.path:
    sys.path.insert(0, str(APP_DIR))

from core.core_model import NonNegMatrix, Tolerances, make_split  # noqa: E402

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def _split(T, F, tol=None):
    return make_split(NonNegMatrix(entries=T), NonNegMatrix(entries=F), tol)


@pytest.fixture
def split_of():
    """Factory building a SplitSystem from nested lists."""
    return _split


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def r_a_worked() -> float:
    return (1.0 + np.sqrt(3.0)) / 2.0


@pytest.fixture
def worked_split():
    """T=[[0,0],[0.5,0]], F=[[1,1],[0,0]]: R0 = 1.5, r(A) = (1+sqrt(3))/2."""
    return _split([[0, 0], [0.5, 0]], [[1, 1], [0, 0]])


@pytest.fixture
def subcritical_split():
    """T=[[0,0],[0.5,0]], F=[[0.25,0.25],[0,0]]: R0 = 0.375, r(A) = 0.5."""
    return _split([[0, 0], [0.5, 0]], [[0.25, 0.25], [0, 0]])


@pytest.fixture
def tolerances() -> Tolerances:
    return Tolerances()


@pytest.fixture(autouse=True)
def _clean_tolerance_env(monkeypatch):
    for name in ("R0_TOL_EQ", "R0_TOL_SPEC", "R0_TOL_SPLIT", "R0_MAX_ITER"):
        monkeypatch.delenv(name, raising=False)
