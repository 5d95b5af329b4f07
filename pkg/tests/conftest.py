import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


def random_interior_state(rng, n):
    """Strictly interior barycentric vector, bounded away from the faces."""
    w = rng.uniform(0.05, 1.0, size=n)
    return w / w.sum()
