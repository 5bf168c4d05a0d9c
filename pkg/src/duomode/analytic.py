"""Closed-form steady-state moments in the exponential and oscillatory regimes.

Every expression is written term by term in normalised units (rates divided
by kappa).  The only rewriting is that cosh^2(psi) and cos^2(chi) are both
evaluated as the rational ``S = 1 / (1 + lambda^2 - g^2)``, with
sinh^2(psi) = (g^2 - lambda^2) S and sin^2(chi) = (lambda^2 - g^2) S, so both
branches stay finite and continuous through the exceptional point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, fields

from .errors import DegeneratePopulationError, InstabilityError
from .model import ReservoirSpec, SystemParams

POPULATION_FLOOR = 1e-12


@dataclass(frozen=True)
class SteadyStateReport:
    """Steady-state fluctuation, population and correlation summary.

    Degrees are ``None`` only when the report was built with ``strict=False``
    and a population vanishes.
    """

    var_xa: float
    var_ya: float
    var_xb: float
    var_yb: float
    xy_a: float
    xy_b: float
    pop_a: float
    pop_b: float
    corr_aa: complex
    corr_bb: complex
    corr_ab: complex
    corr_adag_b: complex
    eta_aa: float | None
    eta_bb: float | None
    gamma_ab: float | None
    eta_ab: float | None

    def as_dict(self) -> dict[str, float | complex | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


REPORT_FIELDS = tuple(f.name for f in fields(SteadyStateReport))
DEGREE_FIELDS = ("eta_aa", "eta_bb", "gamma_ab", "eta_ab")


def _require_stable(params: SystemParams) -> None:
    if params.threshold <= 0.0:
        raise InstabilityError("unstable: kappa^2+lambda^2-g^2 <= 0")


def _is_oscillatory(params: SystemParams) -> bool:
    return params.lam_bar > params.g_bar


# -- variances ---------------------------------------------------------------

def _variances_exponential(g, lam, n, m, phi):
    S = 1.0 / (1.0 + lam * lam - g * g)
    sinh2 = (g * g - lam * lam) * S
    c2 = math.cos(2 * phi)
    amp = 1.0 + 0.5 * sinh2
    var_xa = (0.5 + n + m) * amp + 0.5 * (g - lam) ** 2 * (0.5 + n - m * c2) * S
    var_ya = (0.5 + n - m) * amp + 0.5 * (g + lam) ** 2 * (0.5 + n + m * c2) * S
    var_xb = (0.5 + n + m * c2) * amp + 0.5 * (g - lam) ** 2 * (0.5 + n - m) * S
    var_yb = (0.5 + n - m * c2) * amp + 0.5 * (g + lam) ** 2 * (0.5 + n + m) * S
    return var_xa, var_ya, var_xb, var_yb


def _variances_oscillatory(g, lam, n, m, phi):
    S = 1.0 / (1.0 + lam * lam - g * g)
    sin2 = (lam * lam - g * g) * S
    c2 = math.cos(2 * phi)
    cos_sq = math.cos(phi) ** 2
    var_xa = (0.5 + n + m - m * cos_sq * sin2) - (0.5 + n - m * c2) * g * (lam - g) * S
    var_ya = (0.5 + n - m + m * cos_sq * sin2) + (0.5 + n + m * c2) * g * (lam + g) * S
    var_xb = (0.5 + n + m * c2 - m * cos_sq * sin2) - (0.5 + n - m) * g * (lam - g) * S
    var_yb = (0.5 + n - m * c2 + m * cos_sq * sin2) + (0.5 + n + m) * g * (lam + g) * S
    return var_xa, var_ya, var_xb, var_yb


def steady_variances(params: SystemParams, res: ReservoirSpec) -> tuple[float, float, float, float]:
    """Quadrature variances (var_xa, var_ya, var_xb, var_yb)."""
    _require_stable(params)
    branch = _variances_oscillatory if _is_oscillatory(params) else _variances_exponential
    return branch(params.g_bar, params.lam_bar, res.n, res.m, params.phi)


# -- populations --------------------------------------------------------------

def steady_populations(params: SystemParams, res: ReservoirSpec) -> tuple[float, float]:
    # identical rational form in both regimes
    _require_stable(params)
    g, lam, n, m = params.g_bar, params.lam_bar, res.n, res.m
    S = params.gain_factor
    pop_a = n + ((0.5 + n) * g * g + g * lam * m * math.cos(2 * params.phi)) * S
    pop_b = n + ((0.5 + n) * g * g + g * lam * m) * S
    return pop_a, pop_b


# -- single-mode correlations ---------------------------------------------------

def _two_photon_exponential(g, lam, n, m, phi):
    S = 1.0 / (1.0 + lam * lam - g * g)
    ph = cmath.exp(1j * phi)
    corr_aa = m - (
        (0.5 + n) * g * lam
        + m * math.sin(phi) * cmath.exp(-1j * (phi + math.pi / 2)) * g * g
        + m * math.cos(phi) * ph * lam * lam
    ) * S
    corr_bb = m * ph * ph - (
        (0.5 + n) * g * lam
        + m * math.sin(phi) * cmath.exp(1j * (phi - math.pi / 2)) * g * g
        + m * math.cos(phi) * ph * lam * lam
    ) * S
    return corr_aa, corr_bb


def _two_photon_oscillatory(g, lam, n, m, phi):
    S = 1.0 / (1.0 + lam * lam - g * g)
    sin2 = (lam * lam - g * g) * S
    ph = cmath.exp(1j * phi)
    corr_aa = m - m * math.cos(phi) * ph * sin2 - ((0.5 + n) * g * lam + m * g * g * math.cos(2 * phi)) * S
    corr_bb = m * ph * ph - m * math.cos(phi) * ph * sin2 - ((0.5 + n) * g * lam + m * g * g) * S
    return corr_aa, corr_bb


def same_mode_two_photon(params: SystemParams, res: ReservoirSpec) -> tuple[complex, complex]:
    """Single-mode two-photon correlators (<aa>, <bb>)."""
    _require_stable(params)
    branch = _two_photon_oscillatory if _is_oscillatory(params) else _two_photon_exponential
    return branch(params.g_bar, params.lam_bar, res.n, res.m, params.phi)


def same_mode_xy(params: SystemParams, res: ReservoirSpec) -> tuple[float, float]:
    """Symmetrised same-mode moments (<X_a Y_a>_sym, <X_b Y_b>_sym).

    The commutator part i/2 is not included.  In the oscillatory regime the
    moments are the imaginary parts of the two-photon correlators.
    """
    _require_stable(params)
    g, lam, n, m, phi = params.g_bar, params.lam_bar, res.n, res.m, params.phi
    if _is_oscillatory(params):
        corr_aa, corr_bb = _two_photon_oscillatory(g, lam, n, m, phi)
        return corr_aa.imag, corr_bb.imag
    sinh2 = (g * g - lam * lam) * params.gain_factor
    s2 = math.sin(2 * phi)
    return 0.5 * m * s2 * sinh2, m * s2 * (1.0 + 0.5 * sinh2)


# -- inter-mode correlations ----------------------------------------------------

@dataclass(frozen=True)
class CrossQuadratures:
    """Sums and differences of symmetrised inter-mode quadrature moments."""

    xx_plus_yy: float
    xx_minus_yy: float
    xy_plus_yx: float
    xy_minus_yx: float

    @property
    def xaxb(self) -> float:
        return 0.5 * (self.xx_plus_yy + self.xx_minus_yy)

    @property
    def yayb(self) -> float:
        return 0.5 * (self.xx_plus_yy - self.xx_minus_yy)

    @property
    def xayb(self) -> float:
        return 0.5 * (self.xy_plus_yx + self.xy_minus_yx)

    @property
    def yaxb(self) -> float:
        return 0.5 * (self.xy_plus_yx - self.xy_minus_yx)


def cross_quadrature_correlators(params: SystemParams, res: ReservoirSpec) -> CrossQuadratures:
    # both regimes share the same form once S replaces cosh^2 / cos^2
    _require_stable(params)
    g, lam, n, m, phi = params.g_bar, params.lam_bar, res.n, res.m, params.phi
    S = params.gain_factor
    s2 = math.sin(2 * phi)
    return CrossQuadratures(
        xx_plus_yy=-m * g * s2 * S,
        xx_minus_yy=m * lam * s2 * S,
        xy_plus_yx=-2.0 * ((0.5 + n) * g + m * lam * math.cos(phi) ** 2) * S,
        xy_minus_yx=-2.0 * m * g * math.sin(phi) ** 2 * S,
    )


def assemble_cross_mode(cq: CrossQuadratures) -> tuple[complex, complex]:
    """(<a^dag b>, <ab>) from inter-mode quadrature moments."""
    corr_adag_b = 0.5 * complex(cq.xx_plus_yy, cq.xy_minus_yx)
    corr_ab = 0.5 * complex(cq.xx_minus_yy, cq.xy_plus_yx)
    return corr_adag_b, corr_ab


def cross_mode_correlators(params: SystemParams, res: ReservoirSpec) -> tuple[complex, complex]:
    """One-photon <a^dag b> and two-photon <ab> inter-mode correlators."""
    _require_stable(params)
    if _is_oscillatory(params):
        return assemble_cross_mode(cross_quadrature_correlators(params, res))
    g, lam, n, m, phi = params.g_bar, params.lam_bar, res.n, res.m, params.phi
    S = params.gain_factor
    ph = cmath.exp(1j * phi)
    corr_adag_b = -m * g * math.sin(phi) * ph * S
    corr_ab = -1j * ((0.5 + n) * g + m * lam * math.cos(phi) * ph) * S
    return corr_adag_b, corr_ab


# -- degrees -------------------------------------------------------------------

def degrees_from_moments(
    pop_a: float,
    pop_b: float,
    corr_aa: complex,
    corr_bb: complex,
    corr_adag_b: complex,
    corr_ab: complex,
) -> tuple[float, float, float, float]:
    """(eta_aa, eta_bb, gamma_ab, eta_ab) from populations and correlators."""
    if min(pop_a, pop_b) <= POPULATION_FLOOR:
        raise DegeneratePopulationError(
            f"degrees undefined for populations ({pop_a:.3g}, {pop_b:.3g})"
        )
    norm = math.sqrt(pop_a * pop_b)
    return (
        (abs(corr_aa) - pop_a) / pop_a,
        (abs(corr_bb) - pop_b) / pop_b,
        abs(corr_adag_b) / norm,
        abs(corr_ab) / norm,
    )


def degrees(params: SystemParams, res: ReservoirSpec) -> tuple[float, float, float, float]:
    pop_a, pop_b = steady_populations(params, res)
    corr_aa, corr_bb = same_mode_two_photon(params, res)
    corr_adag_b, corr_ab = cross_mode_correlators(params, res)
    return degrees_from_moments(pop_a, pop_b, corr_aa, corr_bb, corr_adag_b, corr_ab)


def build_report(
    variances, xy, pops, corr_aa, corr_bb, corr_adag_b, corr_ab, *, strict: bool = True
) -> SteadyStateReport:
    try:
        degs: tuple = degrees_from_moments(*pops, corr_aa, corr_bb, corr_adag_b, corr_ab)
    except DegeneratePopulationError:
        if strict:
            raise
        degs = (None, None, None, None)
    return SteadyStateReport(
        *variances,
        *xy,
        *pops,
        corr_aa=corr_aa,
        corr_bb=corr_bb,
        corr_ab=corr_ab,
        corr_adag_b=corr_adag_b,
        eta_aa=degs[0],
        eta_bb=degs[1],
        gamma_ab=degs[2],
        eta_ab=degs[3],
    )


def steady_state_report(
    params: SystemParams, res: ReservoirSpec, *, strict: bool = True
) -> SteadyStateReport:
    """Full closed-form report.

    With ``strict=False`` a vanishing population yields ``None`` degrees
    instead of raising :class:`DegeneratePopulationError`.
    """
    corr_aa, corr_bb = same_mode_two_photon(params, res)
    corr_adag_b, corr_ab = cross_mode_correlators(params, res)
    return build_report(
        steady_variances(params, res),
        same_mode_xy(params, res),
        steady_populations(params, res),
        corr_aa,
        corr_bb,
        corr_adag_b,
        corr_ab,
        strict=strict,
    )
