from fractions import Fraction

import pytest

from FHMpy import ratlp
from FHMpy.economy import Economy, bundled_economy, load_bundled, parse_allocation

# every LP solved by the suite re-checks its own certificate
ratlp.VERIFY_CERTIFICATES = True


def pytest_configure(config):

    config.addinivalue_line("markers", "slow: long-running runs over many random economies")


@pytest.fixture()
def e1():

    return bundled_economy('e1.txt')


@pytest.fixture()
def e1_prime():

    return bundled_economy('e1_prime.txt')


@pytest.fixture()
def ttc_market():

    return bundled_economy('ttc3.txt')


@pytest.fixture()
def eene_allocation():

    return parse_allocation(load_bundled('e1_prime_eene.alloc'), 4)


@pytest.fixture()
def weak_core_allocation():

    return parse_allocation(load_bundled('e1_weak_core.alloc'), 4)


@pytest.fixture()
def symmetric_market():

    """Two agents with the same order sharing both objects equally"""

    half = Fraction(1, 2)
    return Economy([(0, 1), (0, 1)], [[half, half], [half, half]])


@pytest.fixture()
def no_trade_market():

    """Two agents each owning their favourite"""

    return Economy([(0, 1), (1, 0)], [[1, 0], [0, 1]])
