import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ordlab",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("ordlab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240622)
