import pytest

from deltaprime import builtin_profile


@pytest.fixture(scope="session")
def seba():
    return builtin_profile("seba-quadratic")


@pytest.fixture(scope="session")
def step():
    return builtin_profile("step")


@pytest.fixture(scope="session")
def zero():
    return builtin_profile("zero")
