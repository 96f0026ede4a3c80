import numpy as np
import pytest

from fbf.kernels import KernelParams
from fbf.model import RkhsModel


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_model():
    """Factory for models with several random centers and coefficients."""

    def make(rng, n_s=3, n_u=2, n_y=1, size=5, a_s=0.7, a_u=1.1,
             scale=1.0) -> RkhsModel:
        return RkhsModel(
            centers_s=rng.normal(0.0, scale, (size, n_s)),
            centers_u=rng.normal(0.0, scale, (size, n_u)),
            A=rng.normal(0.0, scale, (size, n_s)),
            kp=KernelParams(a_s, a_u),
            n_y=n_y,
        )

    return make
