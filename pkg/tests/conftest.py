import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# derandomized so repeated runs explore the same examples
settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_simplex(rng, n, size=None):
    """Uniform points of the probability simplex."""
    w = rng.standard_exponential((size, n) if size else n)
    return w / w.sum(axis=-1, keepdims=True)
