import pytest

from critorbit.poly_core import TPoly, load_fixture


@pytest.fixture(scope="session")
def quad():
    return load_fixture("quad.json")


@pytest.fixture(scope="session")
def odd_cubic():
    return load_fixture("odd_cubic.json")


@pytest.fixture(scope="session")
def cubic_i():
    return load_fixture("cubic_i.json")


@pytest.fixture(scope="session")
def quintic():
    return load_fixture("quintic_sym.json")


@pytest.fixture(scope="session")
def quartic():
    return load_fixture("quartic_iterate.json")


@pytest.fixture(scope="session")
def per1_slice():
    return load_fixture("per1_0.json")


@pytest.fixture(scope="session")
def T():
    return TPoly.monomial(1)
