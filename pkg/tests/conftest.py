import pytest

from platestab.plate import Parity, PlateConfig
from platestab import spectrum


@pytest.fixture(scope="session")
def config():
    return PlateConfig()


@pytest.fixture(scope="session")
def longitudinal_pairs(config):
    """First longitudinal eigenpair for m = 1..10."""
    return {
        m: spectrum.find_eigenvalues(
            m, Parity.LONGITUDINAL, 1, config, search_ceiling=200.0
        )[0]
        for m in range(1, 11)
    }


@pytest.fixture(scope="session")
def torsional_pairs(config):
    """First torsional eigenpair for m = 1..10."""
    return {
        m: spectrum.find_eigenvalues(
            m, Parity.TORSIONAL, 1, config, search_ceiling=2e4
        )[0]
        for m in range(1, 11)
    }
