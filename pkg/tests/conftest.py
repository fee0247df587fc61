import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mds53.construction import CodeParams, canonical_params, make_instance
from mds53.galois import GF4

settings.register_profile(
    "default", settings(suppress_health_check=[HealthCheck.too_slow], max_examples=50)
)
settings.register_profile("fast", max_examples=5)
settings.load_profile("default")

# GF(4) elements
W = 2
W1 = 3

# The Frobenius image of the canonical tuple; the only other valid GF(4) tuple
CONJUGATE = CodeParams(lambda_=3, mu=2, theta=2, eta=3, field=GF4)


@pytest.fixture(scope="session")
def inst():
    return make_instance(canonical_params())


@pytest.fixture(scope="session")
def conjugate_inst():
    return make_instance(CONJUGATE)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
