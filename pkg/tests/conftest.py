import pytest

from loopon.lattice import Lattice, box_domain


@pytest.fixture(scope="session")
def z2():
    return Lattice.hypercubic(2)


@pytest.fixture(scope="session")
def hexl():
    return Lattice.hexagonal()


@pytest.fixture(scope="session")
def square(z2):
    return box_domain(z2, (0, 0), (2, 2))


@pytest.fixture(scope="session")
def box3(z2):
    return box_domain(z2, (0, 0), (3, 3))


@pytest.fixture(scope="session")
def box4(z2):
    return box_domain(z2, (0, 0), (4, 4))
