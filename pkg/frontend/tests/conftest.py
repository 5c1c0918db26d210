from pathlib import Path

import matplotlib
import pytest

matplotlib.use("Agg")

_FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return _FIXTURES


@pytest.fixture
def snaps():
    return sorted((_FIXTURES / "snaps").glob("snap_*.flb"))
