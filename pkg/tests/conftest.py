import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from squeezed_iep.qmat2 import from_bloch

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@st.composite
def bloch_vectors(draw, max_norm=1.0):
    """Points in the Bloch ball of radius ``max_norm``."""
    theta = draw(st.floats(0.0, np.pi))
    phi = draw(st.floats(0.0, 2 * np.pi))
    r = draw(st.floats(0.0, max_norm))
    return np.array([r * np.sin(theta) * np.cos(phi), r * np.sin(theta) * np.sin(phi), r * np.cos(theta)])


@st.composite
def states(draw, max_norm=1.0):
    return from_bloch(draw(bloch_vectors(max_norm)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
