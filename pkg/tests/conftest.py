import pytest

from octopt import current_field
from octopt.params import PlannerConfig, TurbineParameters, default_design


@pytest.fixture(scope="session")
def params():
    return TurbineParameters()


@pytest.fixture(scope="session")
def base_design(params):
    return default_design(params)


@pytest.fixture(scope="session")
def default_field():
    return current_field.synthesize(0)


@pytest.fixture(scope="session")
def short_config():
    # 3-day mission keeps unit tests quick; acceptance runs full length.
    return PlannerConfig(mission_hours=72)
