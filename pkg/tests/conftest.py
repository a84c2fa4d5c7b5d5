import numpy as np
import pytest

from mslattice import SpaceParams, geometric_weights


def make_trig_poly(freqs, seed=0, real=False):
    """Random trigonometric polynomial on the given frequency rows.

    Returns (f, coeffs) with f vectorized over (m, d) point batches. With
    ``real=True`` the coefficients are made conjugate-symmetric so f is
    real-valued (requires a sign-symmetric frequency set).
    """
    rng = np.random.default_rng(seed)
    c = rng.normal(size=freqs.shape[0]) + 1j * rng.normal(size=freqs.shape[0])
    if real:
        key = {tuple(row): i for i, row in enumerate(freqs.tolist())}
        sym = np.array([key[tuple(-v for v in row)] for row in freqs.tolist()])
        c = 0.5 * (c + np.conj(c[sym]))

    def f(x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return np.exp(2j * np.pi * (x @ freqs.T)) @ c

    return f, c


@pytest.fixture
def params_d2_a1():
    return SpaceParams(d=2, alpha=1.0, gamma=geometric_weights(2))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT_LINES
    except ImportError:
        return
    if REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in REPORT_LINES:
            terminalreporter.write_line(line)
