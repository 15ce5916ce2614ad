import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "fixed",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("fixed")


@pytest.fixture(scope="session")
def strassen():
    from fmmkit.datasets import load_dataset

    return load_dataset("strassen")


@pytest.fixture(scope="session")
def t58():
    from fmmkit.datasets import load_dataset

    return load_dataset("3x5x5_58")


@pytest.fixture(scope="session")
def teps():
    from fmmkit.datasets import load_dataset

    return load_dataset("teps")
