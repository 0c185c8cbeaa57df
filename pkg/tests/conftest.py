import numpy as np
import pytest

from constraint_hessian.fields import ScalarField

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def x2y_field():
    """G(x, y) = x^2 y; Hessian [[2y, 2x], [2x, 0]] by hand."""
    return ScalarField(
        2,
        lambda p: p[0] ** 2 * p[1],
        lambda p: np.array([2 * p[0] * p[1], p[0] ** 2]),
        lambda p: np.array([[2 * p[1], 2 * p[0]], [2 * p[0], 0.0]]),
        name="x2y",
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
