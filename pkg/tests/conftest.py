import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from nlsnorm.radial import shoot_ground_state  # noqa: E402


@pytest.fixture(scope="session")
def gs_1_3():
    return shoot_ground_state(1, 3.0)


@pytest.fixture(scope="session")
def gs_1_5():
    return shoot_ground_state(1, 5.0)


@pytest.fixture(scope="session")
def gs_2_3():
    return shoot_ground_state(2, 3.0)
