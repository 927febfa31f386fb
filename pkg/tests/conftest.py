import numpy as np
import pytest

from qsl_rtn import BlochVector, RtnParams


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_ball_vector(rng, min_perp: float = 0.0) -> BlochVector:
    """Uniform direction, radius biased toward the interior."""
    while True:
        v = rng.normal(size=3)
        v *= rng.random() ** (1 / 3) / np.linalg.norm(v)
        r = BlochVector(*v)
        if r.r_perp >= min_perp:
            return r


def random_params(rng, *, with_phase: bool = False, g_max: float = 6.0) -> RtnParams:
    g = float(np.exp(rng.uniform(np.log(0.05), np.log(g_max))))
    gamma = float(rng.uniform(0.3, 3.0))
    dp0 = float(rng.uniform(-1.0, 1.0))
    omega = float(rng.uniform(-2.0, 2.0)) if with_phase else 0.0
    v = float(rng.uniform(-1.0, 1.0)) if with_phase else 0.0
    return RtnParams.from_g(g, gamma, delta_p0=dp0, omega=omega, v=v)
