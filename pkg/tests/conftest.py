import json
from pathlib import Path

import pytest

from funnelkit.params import RateParams

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def frozen():
    """Reference values from tests/oracles/build_oracles.py (no funnelkit imports)."""
    return FROZEN


def point(name):
    return RateParams(*FROZEN["points"][name])


def analytic_point(name):
    return RateParams(*FROZEN["analytic_points"][name])
