import numpy as np
import pytest

from hawkes_perfect.harness import bundled_model
from hawkes_perfect.model import ModelParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def sym2d():
    return bundled_model("symmetric_2d")


@pytest.fixture(scope="session")
def asym5d():
    return bundled_model("asymmetric_5d")


def scalar_model(lam=1.0, alpha=1.0, beta=2.0) -> ModelParams:
    return ModelParams.exponential([lam], [[alpha]], [[beta]])


def zero_kernel(lambda0, beta=1.0) -> ModelParams:
    d = len(lambda0)
    return ModelParams.exponential(lambda0, np.zeros((d, d)), np.full((d, d), beta))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
