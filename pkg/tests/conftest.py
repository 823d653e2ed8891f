import numpy as np
import pytest

from trpca import Tensor3


def pytest_addoption(parser):
    parser.addoption(
        "--slow",
        action="store_true",
        default=False,
        help="run the full-size spot checks",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size runs, enabled by --slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def rand_tensor(rng, n1, n2, n3, scale=1.0) -> Tensor3:
    return Tensor3(rng.standard_normal((n1, n2, n3)) * scale)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
