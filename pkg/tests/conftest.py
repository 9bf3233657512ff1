import os

import pytest
from hypothesis import settings

from nodalcount.sampling import SeedPlan

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def plan():
    return SeedPlan(12345)


@pytest.fixture
def rng(plan):
    return plan.stream(0)
