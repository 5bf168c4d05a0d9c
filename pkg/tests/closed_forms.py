"""Specialised closed forms for the degrees, valid only on the stated slices.

Used as oracles for the general degree definitions.  All in units of kappa,
S = 1 / (1 + lambda^2 - g^2).
"""

import math


def S(g, lam):
    return 1.0 / (1.0 + lam * lam - g * g)


def eta_thermal_exponential(g, lam, n):
    s = S(g, lam)
    return -(n + (0.5 + n) * g * (g - lam) * s) / (n + (0.5 + n) * g * g * s)


def eta_thermal_oscillatory(g, lam, n):
    s = S(g, lam)
    return ((0.5 + n) * g * (lam - g) * s - n) / (n + (0.5 + n) * g * g * s)


def eta_same_mode_osc_phi0(g, lam, n, m):
    s = S(g, lam)
    return abs(m - g * ((0.5 + n) * lam + m * g)) * s / (n + g * ((0.5 + n) * g + m * lam) * s) - 1.0


def eta_aa_osc_phi_half_pi(g, lam, n, m):
    s = S(g, lam)
    return abs(m - g * ((0.5 + n) * lam - m * g) * s) / (n + g * ((0.5 + n) * g - m * lam) * s) - 1.0


def eta_bb_osc_phi_half_pi(g, lam, n, m):
    s = S(g, lam)
    return (m - n + g * (0.5 + n - m) * (lam - g) * s) / (n + g * ((0.5 + n) * g + m * lam) * s)


def gamma_ab_phi_half_pi(g, lam, n, m):
    s = S(g, lam)
    return m * g * s / math.sqrt((n + (0.5 + n) * g * g * s) ** 2 - (m * g * lam * s) ** 2)


def eta_ab_phi0(g, lam, n, m):
    s = S(g, lam)
    x = (0.5 + n) * g + m * lam
    return 1.0 + ((1.0 - g) * x * s - n) / (n + g * x * s)


def eta_ab_phi_half_pi(g, lam, n, m):
    s = S(g, lam)
    return (0.5 + n) * g * s / math.sqrt((n + (0.5 + n) * g * g * s) ** 2 - (m * g * lam * s) ** 2)
