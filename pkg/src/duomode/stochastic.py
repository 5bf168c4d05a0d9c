"""Monte Carlo oracle: Euler-Maruyama ensembles of the Langevin equations.

The SDE dx = A x dt + L dW carries symmetrised moments only; its stationary
covariance equals the symmetrised quantum covariance for this linear
Gaussian system.

Random streams: trajectory ``i`` of a run seeded with ``seed`` draws from
``SFC64(SeedSequence(seed, spawn_key=(i,)))``, i.e. the ``i``-th child of
``SeedSequence(seed).spawn``.  Four standard normals are consumed per step.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import _kernels
from .errors import DivergenceError, FactorizationError, InstabilityError, StepSizeError
from .model import ReservoirSpec, SystemParams, classify_regime, diffusion_matrix, drift_matrix, stability

log = logging.getLogger(__name__)

_IU = np.triu_indices(4)


@dataclass(frozen=True)
class SdeConfig:
    dt: float = 1e-3
    t_end: float = 10.0
    n_traj: int = 20_000
    burn_in: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be > 0")
        if self.n_traj < 1:
            raise ValueError("n_traj must be >= 1")
        if not 0.0 <= self.burn_in < 1.0:
            raise ValueError("burn_in must lie in [0, 1)")
        if self.n_steps - self.burn_steps < 2:
            raise ValueError("need at least two post-burn-in samples")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def burn_steps(self) -> int:
        return int(self.burn_in * self.n_steps)


@dataclass(frozen=True)
class EnsembleEstimate:
    """Sample covariance with standard errors from per-trajectory batch means.

    ``halves`` holds the estimates from the first and second half of the
    post-burn-in window, for stationarity checks.
    """

    sigma_hat: NDArray[np.float64]
    stderr: NDArray[np.float64]
    n_effective: int
    halves: NDArray[np.float64]
    halves_stderr: NDArray[np.float64]


def trajectory_bitgen(seed: int, index: int) -> np.random.SFC64:
    return np.random.SFC64(np.random.SeedSequence(seed, spawn_key=(index,)))


def noise_transform(D: NDArray[np.float64], dt: float) -> NDArray[np.float64]:
    """Factor L with L L^T = D dt.

    Lower-triangular Cholesky when D is positive definite; a diagonally
    pivoted Cholesky (rows permuted back) when D is only semidefinite.
    """
    D = 0.5 * (np.asarray(D, dtype=float) + np.asarray(D, dtype=float).T)
    if np.linalg.eigvalsh(D).min() < -1e-10:
        raise FactorizationError("diffusion matrix is not positive semidefinite")
    M = D * dt
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return _pivoted_cholesky(M)


def _pivoted_cholesky(M: NDArray[np.float64], tol: float = 1e-14) -> NDArray[np.float64]:
    n = M.shape[0]
    R = M.copy()
    perm = np.arange(n)
    L = np.zeros_like(M)
    scale = max(float(np.max(np.diag(M))), 1e-300)
    for k in range(n):
        p = k + int(np.argmax(np.diag(R)[k:]))
        if R[p, p] <= tol * scale:
            break
        R[[k, p]] = R[[p, k]]
        R[:, [k, p]] = R[:, [p, k]]
        L[[k, p]] = L[[p, k]]
        perm[[k, p]] = perm[[p, k]]
        L[k, k] = np.sqrt(R[k, k])
        L[k + 1:, k] = R[k + 1:, k] / L[k, k]
        R[k + 1:, k + 1:] -= np.outer(L[k + 1:, k], L[k + 1:, k])
    out = np.zeros_like(M)
    out[perm] = L
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DUOMODE_THREADS", "1")))
    except ValueError:
        return 1


def _from_vech(v: NDArray[np.float64]) -> NDArray[np.float64]:
    S = np.zeros(v.shape[:-1] + (4, 4))
    S[..., _IU[0], _IU[1]] = v
    S[..., _IU[1], _IU[0]] = v
    return S


def _mean_and_stderr(samples: NDArray[np.float64]):
    mean = samples.mean(axis=0)
    if samples.shape[0] < 2:
        err = np.full_like(mean, np.nan)
    else:
        err = samples.std(axis=0, ddof=1) / np.sqrt(samples.shape[0])
    return _from_vech(mean), _from_vech(err)


def run_ensemble(
    params: SystemParams,
    res: ReservoirSpec,
    cfg: SdeConfig,
    *,
    backend: str | None = None,
    threads: int | None = None,
) -> EnsembleEstimate:
    """Integrate ``cfg.n_traj`` trajectories from x = 0 and average x x^T after burn-in."""
    if not stability(params):
        raise InstabilityError("unstable: kappa^2+lambda^2-g^2 <= 0")
    A = drift_matrix(params)
    limit = 0.05 / np.linalg.norm(A, 2)
    if cfg.dt > limit:
        raise StepSizeError(f"dt={cfg.dt} exceeds 0.05/||A|| = {limit:.3g}")
    slowest = -max(r.real for r in classify_regime(params).roots) * params.kappa
    if cfg.t_end < 20.0 / slowest:
        log.info("t_end=%g is shorter than 20 relaxation times (%g)", cfg.t_end, 20.0 / slowest)
    L = noise_transform(diffusion_matrix(params, res), cfg.dt)

    bitgens = [trajectory_bitgen(cfg.seed, i) for i in range(cfg.n_traj)]
    integrate = _kernels.get_integrator(backend)
    means, status = integrate(
        np.ascontiguousarray(A),
        np.ascontiguousarray(L),
        float(cfg.dt),
        cfg.n_steps,
        cfg.burn_steps,
        bitgens,
        threads or _threads(),
    )
    if np.any(status):
        raise DivergenceError(f"{int(np.count_nonzero(status))} trajectories exceeded |x| > 1e6")

    n_samples = cfg.n_steps - cfg.burn_steps
    half = n_samples // 2
    per_traj = (half * means[:, 0] + (n_samples - half) * means[:, 1]) / n_samples
    sigma_hat, stderr = _mean_and_stderr(per_traj)
    h0, e0 = _mean_and_stderr(means[:, 0])
    h1, e1 = _mean_and_stderr(means[:, 1])
    return EnsembleEstimate(
        sigma_hat=sigma_hat,
        stderr=stderr,
        n_effective=cfg.n_traj * n_samples,
        halves=np.stack([h0, h1]),
        halves_stderr=np.stack([e0, e1]),
    )
