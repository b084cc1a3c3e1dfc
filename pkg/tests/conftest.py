import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=15)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


def random_poly(rng, degree, scale=1.0):
    from bergfock.space import Poly

    c = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    return Poly(scale * c)
