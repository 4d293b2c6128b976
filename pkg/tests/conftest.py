import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("steingmm", max_examples=50, deadline=None)
settings.load_profile("steingmm")


@pytest.fixture
def gamma_sample():
    rng = np.random.default_rng(12345)
    return rng.gamma(5.0, 1.0, size=200)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
