import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ridemarket import network, platform


@pytest.fixture
def grid2():
    return network.make_grid(2, 500.0, 36.0)


@pytest.fixture
def grid10():
    return network.make_grid(10, 500.0, 36.0)


@pytest.fixture
def plain_levers():
    return platform.PlatformLevers(
        commission=0.10,
        discount_rate=0.0,
        marketing_active=False,
        per_km_fare=1.2,
        min_fare=2.0,
    )


SCENARIOS_DIR = Path(__file__).parent.parent / "src" / "ridemarket" / "scenarios"


@pytest.fixture
def desk_path():
    return SCENARIOS_DIR / "desk.toml"
