import numpy as np
import pytest
from hypothesis import settings

# BLAS warm-up and process start-up can trip per-example deadlines on
# slow boxes; correctness tests here are not timing-sensitive.
settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
