"""System and reservoir parameters, regime classification, drift and diffusion.

All matrices use the fixed quadrature ordering (X_a, Y_a, X_b, Y_b).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidParameterError, UnphysicalReservoirError

XA, YA, XB, YB = 0, 1, 2, 3
QUADRATURES = ("X_a", "Y_a", "X_b", "Y_b")

EP_TOLERANCE = 1e-9
PHYSICALITY_SLACK = 1e-12

M_MODES = ("thermal", "classical-max", "quantum-max")


@dataclass(frozen=True)
class SystemParams:
    """Coupling and damping rates of the two modes.

    Parameters
    ----------
    kappa:
        Damping rate shared by both modes (> 0).
    g:
        Nonlinear (two-mode squeezing) coupling rate (>= 0).
    lam:
        Linear (photon exchange) coupling rate (>= 0).
    phi:
        Phase of the mode-b reservoir; stored reduced to [0, 2*pi).
    """

    kappa: float = 1.0
    g: float = 0.0
    lam: float = 0.0
    phi: float = 0.0
    g_bar: float = field(init=False, repr=False, compare=False)
    lam_bar: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("kappa", "g", "lam", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.kappa <= 0:
            raise InvalidParameterError(f"kappa must be > 0, got {self.kappa}")
        if self.g < 0 or self.lam < 0:
            raise InvalidParameterError("couplings g and lambda must be >= 0")
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))
        object.__setattr__(self, "g_bar", self.g / self.kappa)
        object.__setattr__(self, "lam_bar", self.lam / self.kappa)

    @property
    def threshold(self) -> float:
        """Normalised kappa^2 + lambda^2 - g^2; positive iff stable."""
        return 1.0 + self.lam_bar**2 - self.g_bar**2

    @property
    def gain_factor(self) -> float:
        """kappa^2 / (kappa^2 + lambda^2 - g^2).

        Equals cosh^2(psi) for g > lambda and cos^2(chi) for lambda > g.
        Only meaningful when stable.
        """
        return 1.0 / self.threshold


@dataclass(frozen=True)
class ReservoirSpec:
    """Thermal occupation ``n`` and two-photon correlation ``m`` of both baths."""

    n: float = 0.0
    m: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.n) and math.isfinite(self.m)):
            raise UnphysicalReservoirError("n and m must be finite")
        if self.n < 0 or self.m < 0:
            raise UnphysicalReservoirError(f"n and m must be >= 0, got n={self.n}, m={self.m}")
        if self.m > self.m_max + PHYSICALITY_SLACK:
            raise UnphysicalReservoirError(
                f"unphysical reservoir: m={self.m} > sqrt(n(n+1))={self.m_max}"
            )
        object.__setattr__(self, "n", float(self.n))
        object.__setattr__(self, "m", float(self.m))

    @property
    def m_max(self) -> float:
        return math.sqrt(self.n * (self.n + 1.0))

    @property
    def is_thermal(self) -> bool:
        return self.m == 0.0

    @property
    def is_classical(self) -> bool:
        return self.m <= self.n

    @classmethod
    def from_mode(cls, n: float, mode: str | float) -> ReservoirSpec:
        """Build a reservoir from ``n`` and an m-mode tag or a literal m.

        ``mode`` is one of ``"thermal"`` (m = 0), ``"classical-max"`` (m = n),
        ``"quantum-max"`` (m = sqrt(n(n+1))) or a number.
        """
        if isinstance(mode, str):
            key = mode.strip().lower()
            if key == "thermal":
                return cls(n, 0.0)
            if key == "classical-max":
                return cls(n, n)
            if key == "quantum-max":
                return cls(n, math.sqrt(n * (n + 1.0)))
            try:
                mode = float(key)
            except ValueError:
                raise UnphysicalReservoirError(f"unknown m-mode {mode!r}") from None
        return cls(n, float(mode))


class Regime(enum.Enum):
    EXPONENTIAL = "exponential"
    OSCILLATORY = "oscillatory"
    EXCEPTIONAL_POINT = "exceptional-point"


@dataclass(frozen=True)
class RegimeInfo:
    """Regime tag, characteristic roots (units of kappa) and auxiliary factors.

    Fields that are undefined in the current regime are ``None``.
    """

    regime: Regime
    roots: tuple[complex, complex]
    kappa: float
    g_bar: float
    lam_bar: float
    alpha: float | None = None
    beta: float | None = None
    psi: float | None = None
    chi: float | None = None
    u: float | None = None
    w: float | None = None


def classify_regime(params: SystemParams, tol: float = EP_TOLERANCE) -> RegimeInfo:
    g, lam = params.g_bar, params.lam_bar
    common = dict(kappa=params.kappa, g_bar=g, lam_bar=lam)
    if abs(g - lam) <= tol * max(g, lam, 1.0):
        return RegimeInfo(Regime.EXCEPTIONAL_POINT, (-1.0 + 0j, -1.0 + 0j), **common)
    if g > lam:
        alpha = math.sqrt((g - lam) * (g + lam))
        return RegimeInfo(
            Regime.EXPONENTIAL,
            (complex(-1.0 + alpha), complex(-1.0 - alpha)),
            alpha=alpha,
            psi=math.atanh(alpha) if alpha < 1.0 else None,
            u=math.sqrt((g - lam) / (g + lam)),
            **common,
        )
    beta = math.sqrt((lam - g) * (lam + g))
    return RegimeInfo(
        Regime.OSCILLATORY,
        (complex(-1.0, beta), complex(-1.0, -beta)),
        beta=beta,
        chi=math.atan(beta),
        w=math.sqrt((lam - g) / (lam + g)),
        **common,
    )


def stability(params: SystemParams) -> bool:
    """True iff every characteristic root has a negative real part."""
    return params.threshold > 0.0


def drift_matrix(params: SystemParams) -> NDArray[np.float64]:
    k, g, lam = params.kappa, params.g, params.lam
    A = -k * np.eye(4)
    A[XA, YB] = -(g - lam)
    A[YA, XB] = -(g + lam)
    A[XB, YA] = -(g - lam)
    A[YB, XA] = -(g + lam)
    return A


def input_noise_covariance(params: SystemParams, res: ReservoirSpec) -> NDArray[np.float64]:
    """Symmetrised covariance of the input-noise quadratures (delta-correlated weights)."""
    n, m = res.n, res.m
    c2, s2 = math.cos(2.0 * params.phi), math.sin(2.0 * params.phi)
    N = np.zeros((4, 4))
    N[XA, XA] = 0.5 + n + m
    N[YA, YA] = 0.5 + n - m
    N[XB, XB] = 0.5 + n + m * c2
    N[YB, YB] = 0.5 + n - m * c2
    N[XB, YB] = N[YB, XB] = m * s2
    return N


def diffusion_matrix(params: SystemParams, res: ReservoirSpec) -> NDArray[np.float64]:
    if res.m > res.m_max + PHYSICALITY_SLACK:
        raise UnphysicalReservoirError(f"m={res.m} exceeds sqrt(n(n+1))={res.m_max}")
    return 2.0 * params.kappa * input_noise_covariance(params, res)


def symplectic_form() -> NDArray[np.float64]:
    """Omega with [r_j, r_k] = i Omega_jk for r = (X_a, Y_a, X_b, Y_b)."""
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    Z = np.zeros((2, 2))
    return np.block([[J, Z], [Z, J]])
