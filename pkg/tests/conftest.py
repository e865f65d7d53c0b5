import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def random_symmetric(rng, n, low=-1.0, high=1.0):
    a = rng.uniform(low, high, (n, n))
    return np.triu(a) + np.triu(a, 1).T


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
