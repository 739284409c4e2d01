import numpy as np
import pytest

from parde.rng import RngStream


@pytest.fixture
def rng():
    return RngStream(12345)


def within_sigma(observed, expected, sd, k=3.0):
    return abs(observed - expected) <= k * sd


@pytest.fixture
def data():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance  # noqa: F401  (populated only if the module ran)

    lines = test_acceptance.ACCEPTANCE
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines, key=lambda k: (int(k.split()[0]), k)):
        terminalreporter.write_line(f"criterion {key}: {lines[key]}")
