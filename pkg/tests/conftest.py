import pytest

from hblab import pythagoras, series, space


@pytest.fixture(scope="session")
def dirichlet_pair():
    #: the regular part of log|a| is analytic with poles at tau and 1/tau, so a small grid already resolves it
    return pythagoras.pair_from_phi(series.LocalDirichlet(), grid_size=2**12, trunc=512)


@pytest.fixture(scope="session")
def dirichlet_ctx():
    return space.HbContext.from_phi(series.LocalDirichlet(), 512)


@pytest.fixture(scope="session")
def zero_ctx():
    return space.HbContext.from_phi(series.parse_phi("zero"), 512)
