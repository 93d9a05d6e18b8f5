import numpy as np
import pytest
from hypothesis import strategies as st

from core.utils.sampling import sample_lagrangian_state, sample_pirani_state

# Bounded reals keep products well inside double range
reals = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
four_vectors = st.lists(reals, min_size=4, max_size=4).map(np.array)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def pirani_state(rng):
    return sample_pirani_state(rng)


@pytest.fixture
def lagrangian_state(rng):
    return sample_lagrangian_state(rng)
