import itertools
import math

import numpy as np
import pytest

from duomode.model import M_MODES, ReservoirSpec, SystemParams, stability

GRID_G = (0.0, 0.3, 0.5, 0.8, 0.99, 1.2, 3.0)
GRID_LAMBDA = (0.0, 0.3, 0.5, 0.8, 1.0, 3.0, 5.0)
GRID_N = (0.0, 0.5, 2.0)
GRID_PHI = (0.0, math.pi / 4, math.pi / 2, 2.1)


def acceptance_grid():
    """Stable, physical points of the equivalence grid (kappa = 1)."""
    for g, lam, n, mode, phi in itertools.product(GRID_G, GRID_LAMBDA, GRID_N, M_MODES, GRID_PHI):
        params = SystemParams(1.0, g, lam, phi)
        if stability(params):
            yield params, ReservoirSpec.from_mode(n, mode)


def close(a, b, rtol=1e-9, atol=1e-12):
    return abs(a - b) <= rtol * abs(b) + atol


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def report_covariance(report):
    """Symmetrised 4x4 covariance (X_a, Y_a, X_b, Y_b) assembled from a report."""
    r = report
    adb, ab = r.corr_adag_b, r.corr_ab
    xaxb = (adb + ab).real
    yayb = (adb - ab).real
    xayb = (adb + ab).imag
    yaxb = (ab - adb).imag
    return np.array(
        [
            [r.var_xa, r.xy_a, xaxb, xayb],
            [r.xy_a, r.var_ya, yaxb, yayb],
            [xaxb, yaxb, r.var_xb, r.xy_b],
            [xayb, yayb, r.xy_b, r.var_yb],
        ]
    )


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
