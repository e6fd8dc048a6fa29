import numpy as np
import pytest

from oamdiffraction import experiments as ex
from oamdiffraction.fields import ScalarField, TransverseGrid

A = ex.OBSTACLE_RADIUS
LAM = ex.WAVELENGTH
KAPPA = ex.KAPPA
W_BG = ex.BG_WAIST
W_LG1 = 0.8 * A * np.sqrt(2.0)


@pytest.fixture(scope="session")
def grid():
    """Default 1024^2 grid over an 8 mm window."""
    return ex.default_grid()


@pytest.fixture(scope="session")
def small_grid():
    return TransverseGrid.square(64, 2e-3)


def random_field(grid, rng, normalized=False):
    amp = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    f = ScalarField(grid, amp, LAM)
    if normalized:
        from oamdiffraction.fields import normalize

        f = normalize(f)
    return f
