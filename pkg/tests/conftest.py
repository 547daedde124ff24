import numpy as np
import pytest

from remad.channels import QutritParams, TransitionMatrix


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_transition(rng: np.random.Generator, d: int) -> TransitionMatrix:
    rows = [[1.0]] + [list(rng.dirichlet(np.ones(j + 1))) for j in range(1, d)]
    return TransitionMatrix.from_rows(rows)


def random_params(rng: np.random.Generator) -> QutritParams:
    g20, g21, _ = rng.dirichlet(np.ones(3))
    return QutritParams(float(rng.uniform()), float(g21), float(g20))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# Acceptance criteria report one line each; collected here and echoed in the
# terminal summary so they appear even when output capture is on.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
