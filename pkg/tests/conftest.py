import pytest

from lmoments.characters import build_modulus


@pytest.fixture(scope="session")
def mod5():
    return build_modulus(5)


@pytest.fixture(scope="session")
def mod7():
    return build_modulus(7)


@pytest.fixture(scope="session")
def mod101():
    return build_modulus(101)
