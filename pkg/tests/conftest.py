import numpy as np
import pytest

from zlab import AngularPartition, DyadicLadder, make_grid


@pytest.fixture(scope="session")
def grid64():
    return make_grid(2, 2 * np.pi, 64)


@pytest.fixture(scope="session")
def grid32_1d():
    return make_grid(1, 2 * np.pi, 32)


@pytest.fixture(scope="session")
def grid16_3d():
    return make_grid(3, 2 * np.pi, 16)


@pytest.fixture(scope="session")
def ladder64(grid64):
    return DyadicLadder.for_grid(grid64)


@pytest.fixture(scope="session")
def partition2():
    return AngularPartition.build(2, 2.0)
