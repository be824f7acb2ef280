import pytest

from saet import fixtures


@pytest.fixture(scope="session")
def square():
    return fixtures.square_complex()


@pytest.fixture(scope="session")
def fix_a(square):
    return fixtures.fix_a(square)


@pytest.fixture(scope="session")
def fix_b(square):
    return fixtures.fix_b(square)


@pytest.fixture(scope="session")
def wedge():
    return fixtures.wedge_complex()


@pytest.fixture(scope="session")
def fix_c(wedge):
    return fixtures.fix_c(wedge)


@pytest.fixture(scope="session")
def fix_a_embedded(fix_a):
    from saet.carve import appropriate_embed

    return appropriate_embed(fix_a)
