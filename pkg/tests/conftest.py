import numpy as np
import pytest

from predprey_lab.kinetics import dl_model
from predprey_lab.pde import build_grid


@pytest.fixture
def holling():
    """a=2, b=1, m=1, d=1 with c=0.1; the prey growth factor peaks at u=0.5."""
    return dl_model(2.0, 1.0, 1.0, 0.1, 1.0, d1=0.01, d2=0.01)


@pytest.fixture
def grid1d():
    return build_grid(1, [1.0], [101])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
