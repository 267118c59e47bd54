import os

import pytest
from hypothesis import settings, HealthCheck

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def golden():
    from rwentropy.presets import get_preset
    return get_preset("golden")


@pytest.fixture(scope="session")
def random_ab():
    from rwentropy.presets import get_preset
    return get_preset("random-ab")


@pytest.fixture(scope="session")
def golden_seq(golden):
    from rwentropy.partition import exact_sequence
    from rwentropy.walk import SamplePath
    return exact_sequence(SamplePath(golden.measure, 0), -24, 48)


@pytest.fixture(scope="session")
def random_seq(random_ab):
    from rwentropy.partition import build_sequence
    from rwentropy.walk import SamplePath
    return build_sequence(SamplePath(random_ab.measure, 11), -40, 80)
