import numpy as np
import pytest

from gyrodiff import gaussian_bump_spec


@pytest.fixture
def unit_spec():
    """Gaussian-bump field spec with unit variance and length scale."""
    return gaussian_bump_spec(sigma2=1.0, ell=1.0, master_seed=1234)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
