import math

import numpy as np
import pytest
from hypothesis import strategies as st

from wavescope.wave_model import WaveClassId, WaveParameters, bifurcation_rhs

ALPHA_RANGES = {
    WaveClassId.W1: (-30.0, -1.5),
    WaveClassId.W2: (-1.0, -1.0),
    WaveClassId.W3: (-0.95, -0.05),
    WaveClassId.W4: (0.1, 30.0),
}


def draw_params(rng: np.random.Generator, cls: WaveClassId, epsilon: float = 0.05) -> WaveParameters:
    """A random feasible wave of class ``cls``."""
    lo, hi = ALPHA_RANGES[cls]
    while True:
        alpha0 = lo if lo == hi else float(rng.uniform(lo, hi))
        if cls == WaveClassId.W4:
            lam = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 5.0))
            return WaveParameters.create(alpha0, lam, epsilon)
        lam = float(rng.uniform(0.05, 2 * math.pi - 0.05))
        r = bifurcation_rhs(alpha0, lam)
        # keep the amplitude moderate so finite-difference checks stay well conditioned
        if r > 1e-2 and math.isfinite(r):
            return WaveParameters.create(alpha0, lam, epsilon)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fig3_left():
    return WaveParameters.create(-20.0, 4.39, 0.05)


@pytest.fixture(scope="session")
def fig3_right():
    return WaveParameters.create(-20.0, 4.60, 0.05)


@st.composite
def waves(draw, classes=tuple(WaveClassId), epsilon=st.floats(0.0, 0.1)):
    """Hypothesis strategy over feasible waves of every class."""
    cls = draw(st.sampled_from(classes))
    seed = draw(st.integers(0, 2**32 - 1))
    return draw_params(np.random.default_rng(seed), cls, draw(epsilon))
