import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow", action="store_true", default=False,
        help="run the slow training-based acceptance criteria",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="slow training run; use --run-slow (or -m slow)")
    markexpr = config.getoption("-m")
    if "slow" in markexpr:
        return
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
