"""Parameter grids behind the published figures, evaluated with the closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .model import ReservoirSpec, SystemParams

SAMPLES = 200
N_AXIS = tuple(float(v) for v in np.linspace(0.0, 2.0, 21))


@dataclass(frozen=True)
class FigurePoint:
    curve: str
    params: SystemParams
    res: ReservoirSpec


@dataclass(frozen=True)
class Figure:
    name: str
    quantities: tuple[str, ...]
    points: Callable[[float | None], Iterator[FigurePoint]]
    default_lambda: float | None = None


def _axis(stop: float) -> np.ndarray:
    return np.linspace(0.0, stop, SAMPLES)


def _fig2(g: float):
    def points(lam_override):
        n = 0.1
        res = ReservoirSpec.from_mode(n, "quantum-max")
        for label, phi in (("phi=0", 0.0), ("phi=pi/2", math.pi / 2)):
            for lam in _axis(g):
                yield FigurePoint(label, SystemParams(1.0, g, float(lam), phi), res)
    return points


def _fig5(lam_override):
    res = ReservoirSpec(0.0, 0.0)
    for lam in (5.0, 10.0, 15.0, 20.0):
        for g in _axis(lam):
            yield FigurePoint(f"lambda={lam:g}", SystemParams(1.0, float(g), lam), res)


def _g_n_grid(lam: float, phi: float, mode: str):
    for n in N_AXIS:
        res = ReservoirSpec.from_mode(n, mode)
        for g in _axis(lam):
            yield FigurePoint(f"n={n:g}", SystemParams(1.0, float(g), lam, phi), res)


def _fig8(lam_override):
    lam = 5.0 if lam_override is None else lam_override
    n = 1.0
    for frac in (0.5, 0.75, 0.9, 1.0):
        res = ReservoirSpec(n, frac * n)
        for g in _axis(lam):
            yield FigurePoint(f"m={frac:g}n", SystemParams(1.0, float(g), lam, math.pi / 2), res)


def _grid(default_lam: float, phi: float, mode):
    def points(lam_override):
        lam = default_lam if lam_override is None else lam_override
        return _g_n_grid(lam, phi, mode)
    return points


FIGURES: dict[str, Figure] = {
    "fig2a": Figure("fig2a", ("pop_a",), _fig2(0.5)),
    "fig2b": Figure("fig2b", ("pop_a",), _fig2(0.99)),
    "fig5": Figure("fig5", ("var_xa", "var_xb"), _fig5),
    "fig6": Figure("fig6", ("eta_aa", "eta_bb"), _grid(5.0, 0.0, "thermal"), 5.0),
    # caption value; the discussion in the text uses lambda = 5
    "fig7": Figure("fig7", ("eta_aa", "eta_bb"), _grid(0.8, 0.0, "quantum-max"), 0.8),
    "fig8": Figure("fig8", ("eta_aa", "eta_bb"), _fig8, 5.0),
    "fig9": Figure("fig9", ("gamma_ab",), _grid(1.0, math.pi / 2, "quantum-max"), 1.0),
    "fig10": Figure("fig10", ("eta_ab",), _grid(0.8, 0.0, "classical-max"), 0.8),
}
