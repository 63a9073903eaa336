import pytest
from hypothesis import HealthCheck, settings

from _registry import PROPERTY_RESULTS
from basketforge.checks import Context
from basketforge.fixtures import load_chi1, load_tablec

settings.register_profile(
    "suite",
    max_examples=10_000,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def ctx():
    return Context()


@pytest.fixture(scope="session")
def tablec():
    return load_tablec()


@pytest.fixture(scope="session")
def chi1ref():
    return load_chi1()


def pytest_collection_modifyitems(items):
    # the acceptance file summarizes the property suite, so it runs last
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py") or "test_acceptance.py" in it.nodeid)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_properties.py::" in report.nodeid:
        PROPERTY_RESULTS[report.nodeid.rsplit("::", 1)[1]] = report.passed
