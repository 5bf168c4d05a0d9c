"""Numerical covariance engine: Lyapunov steady state, RK4 transients, mean propagation."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

from .analytic import SteadyStateReport, build_report
from .errors import InstabilityError, SingularSystemError, StepSizeError
from .model import XA, XB, YA, YB, Regime, RegimeInfo, symplectic_form

_IU = np.triu_indices(4)
_COND_LIMIT = 1e12


def _vech_operator(A: NDArray[np.float64]) -> NDArray[np.float64]:
    """Matrix of Sigma -> A Sigma + Sigma A^T restricted to symmetric Sigma (10x10)."""
    K = np.empty((10, 10))
    for col, (i, j) in enumerate(zip(*_IU)):
        E = np.zeros((4, 4))
        E[i, j] = E[j, i] = 1.0
        K[:, col] = (A @ E + E @ A.T)[_IU]
    return K


def _unvech(v: NDArray[np.float64]) -> NDArray[np.float64]:
    S = np.zeros((4, 4))
    S[_IU] = v
    return S + np.triu(S, 1).T


def is_strictly_stable(A: NDArray[np.float64]) -> bool:
    return bool(np.max(np.linalg.eigvals(A).real) < 0.0)


def steady_state_lyapunov(A: NDArray[np.float64], D: NDArray[np.float64]) -> NDArray[np.float64]:
    """Solve A Sigma + Sigma A^T + D = 0 for the symmetric steady-state covariance."""
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    if not is_strictly_stable(A):
        raise InstabilityError("drift matrix is not strictly stable")
    K = _vech_operator(A)
    if np.linalg.cond(K) > _COND_LIMIT:
        raise SingularSystemError("Lyapunov system is numerically rank-deficient")
    Dsym = 0.5 * (D + D.T)
    return _unvech(np.linalg.solve(K, -Dsym[_IU]))


def lyapunov_residual(A, D, sigma) -> float:
    return float(np.linalg.norm(A @ sigma + sigma @ A.T + D))


def max_step(A: NDArray[np.float64]) -> float:
    return 0.1 / np.linalg.norm(A, 2)


def evolve_covariance(
    A: NDArray[np.float64],
    D: NDArray[np.float64],
    sigma0: NDArray[np.float64],
    t: float,
    dt: float,
) -> NDArray[np.float64]:
    """Integrate dSigma/dt = A Sigma + Sigma A^T + D from 0 to ``t`` with RK4.

    The step is shortened uniformly so that an integer number of steps lands
    exactly on ``t``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if dt <= 0:
        raise StepSizeError("dt must be > 0")
    if dt > max_step(A):
        raise StepSizeError(f"dt={dt} exceeds 0.1/||A|| = {max_step(A):.3g}")
    sigma = 0.5 * (np.asarray(sigma0, dtype=float) + np.asarray(sigma0, dtype=float).T)
    if t == 0:
        return sigma
    steps = math.ceil(t / dt - 1e-12)
    h = t / steps

    def rhs(S):
        AS = A @ S
        return AS + AS.T + D

    for _ in range(steps):
        k1 = rhs(sigma)
        k2 = rhs(sigma + 0.5 * h * k1)
        k3 = rhs(sigma + 0.5 * h * k2)
        k4 = rhs(sigma + h * k3)
        sigma = sigma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        sigma = 0.5 * (sigma + sigma.T)
    return sigma


def _pair(regime: RegimeInfo, x: float, y: float, t: float) -> tuple[float, float]:
    """Homogeneous evolution of an (X_i, Y_j) pair, i != j, in real time ``t``."""
    k = regime.kappa
    g, lam = regime.g_bar * k, regime.lam_bar * k
    if regime.regime is Regime.EXPONENTIAL:
        u = regime.u
        p1, p2 = regime.roots[0].real * k, regime.roots[1].real * k
        e1, e2 = math.exp(p1 * t), math.exp(p2 * t)
        xt = 0.5 * ((x - u * y) * e1 + (x + u * y) * e2)
        yt = (-(x - u * y) * e1 + (x + u * y) * e2) / (2.0 * u)
        return xt, yt
    if regime.regime is Regime.OSCILLATORY:
        w = regime.w
        p3, p4 = regime.roots[0] * k, regime.roots[1] * k
        e3, e4 = np.exp(p3 * t), np.exp(p4 * t)
        xt = 0.5 * ((x - 1j * w * y) * e3 + (x + 1j * w * y) * e4)
        yt = 1j / (2.0 * w) * ((x - 1j * w * y) * e3 - (x + 1j * w * y) * e4)
        return float(xt.real), float(yt.real)
    # exceptional point: degenerate root -kappa, X never sees Y
    decay = math.exp(-k * t)
    return decay * x, decay * (y - (g + lam) * t * x)


def propagate_mean(regime: RegimeInfo, x0, t: float) -> NDArray[np.float64]:
    """Noise-free evolution exp(A t) x0 from the closed-form root decomposition."""
    if t < 0:
        raise ValueError("t must be >= 0")
    x0 = np.asarray(x0, dtype=float)
    out = np.empty(4)
    # X_a pairs with Y_b, X_b pairs with Y_a
    out[XA], out[YB] = _pair(regime, x0[XA], x0[YB], t)
    out[XB], out[YA] = _pair(regime, x0[XB], x0[YA], t)
    return out


def physicality_margin(sigma: NDArray[np.float64]) -> float:
    """Smallest eigenvalue of Sigma + (i/2) Omega; >= 0 for a physical state."""
    return float(np.linalg.eigvalsh(sigma + 0.5j * symplectic_form()).min())


def report_from_covariance(sigma: NDArray[np.float64], *, strict: bool = True) -> SteadyStateReport:
    s = np.asarray(sigma, dtype=float)
    var = (s[XA, XA], s[YA, YA], s[XB, XB], s[YB, YB])
    pop_a = 0.5 * (var[0] + var[1] - 1.0)
    pop_b = 0.5 * (var[2] + var[3] - 1.0)
    corr_aa = complex(0.5 * (var[0] - var[1]), s[XA, YA])
    corr_bb = complex(0.5 * (var[2] - var[3]), s[XB, YB])
    corr_adag_b = 0.5 * complex(s[XA, XB] + s[YA, YB], s[XA, YB] - s[YA, XB])
    corr_ab = 0.5 * complex(s[XA, XB] - s[YA, YB], s[XA, YB] + s[YA, XB])
    return build_report(
        tuple(float(v) for v in var),
        (float(s[XA, YA]), float(s[XB, YB])),
        (float(pop_a), float(pop_b)),
        corr_aa,
        corr_bb,
        corr_adag_b,
        corr_ab,
        strict=strict,
    )
