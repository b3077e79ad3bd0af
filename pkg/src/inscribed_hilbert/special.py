"""Dilogarithm and the closed-form comparison integrals for inscribed triangles."""

from __future__ import annotations

import math

from scipy import integrate, special

PI2_6 = math.pi**2 / 6.0


def dilog(z: float) -> float:
    """Real dilogarithm Li2(z) on [0, 1], via ``scipy.special.spence(1 - z)``."""
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"dilog is implemented on [0, 1], got {z}")
    return float(special.spence(1.0 - z))


def key_integral_closed_form(tau: float) -> float:
    """pi^2/6 + (log tau)^2 / 2 + Li2(1 - tau)."""
    _check_tau(tau)
    lt = math.log(tau)
    return PI2_6 + 0.5 * lt * lt + dilog(1.0 - tau)


def _check_tau(tau: float):
    if not (0.0 < tau <= 1.0):
        raise ValueError(f"tau must lie in (0, 1], got {tau}")


def comparison_integral_triangle(tau: float, epsrel: float = 1e-13) -> float:
    """Numerical value of the double integral of dy dx / (x y) over the triangle
    with vertices (1, 0), (1, 1), (0, tau).

    The inner y-integral is the logarithm of the ratio of the two side
    lines; the outer x-integral is done adaptively, split at x = 1/2 to keep
    the log(1 - x) endpoint singularity in its own panel.
    """
    _check_tau(tau)
    k = 1.0 / tau - 1.0

    def inner(x: float) -> float:
        if x == 0.0:
            return k + 1.0
        return (math.log1p(k * x) - math.log1p(-x)) / x

    opts = dict(epsabs=0.0, epsrel=epsrel, limit=400)
    left, _ = integrate.quad(inner, 0.0, 0.5, **opts)
    right, _ = integrate.quad(inner, 0.5, 1.0, **opts)
    return left + right


def sector_bound(h: float, m: float) -> float:
    """Integral of dx dy / y over the sector -y <= m x <= y, 0 < y < h, i.e. 2h/m."""
    if h <= 0 or m <= 0:
        raise ValueError("sector_bound needs h > 0 and m > 0")
    return 2.0 * h / m
