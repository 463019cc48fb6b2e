import numpy as np
import pytest
from hypothesis import settings

# deterministic property tests: same examples on every run
settings.register_profile("repro", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("repro")

SEED = 42


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
