import numpy as np
import pytest

from geoeval.geometry import W2C, Trajectory, project_rotation


def random_rotation(rng):
    """Uniform-ish random rotation via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return project_rotation(q)


def random_trajectory(rng, n, convention=W2C, scale=1.0):
    rots = np.stack([random_rotation(rng) for _ in range(n)])
    trans = rng.standard_normal((n, 3)) * scale
    return Trajectory(np.arange(n), rots, trans, convention)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
