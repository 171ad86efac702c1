import pytest

from dbwsim.config import load_config


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture(scope="session")
def _warm_kernels():
    from dbwsim import kernels

    kernels.warmup()
