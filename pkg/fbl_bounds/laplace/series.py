"""Taylor-coefficient recursions for the descent path around a saddle.

All coefficient arrays are indexed by power: ``a[m]`` multiplies
``(s - s_star)**m`` and ``p[m]``, ``c[m]`` multiply ``u**m``.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np

from ..errors import DegenerateSaddle, PoleAtSaddle

_SPLIT_NEWTON = 30


def series_sqrt_invert(a: Sequence[float]) -> np.ndarray:
    """Coefficients f_1..f_{M-1} of f(t) with f(t)^2 = -(alpha(s_star + t) - alpha(s_star)).

    ``a`` holds a_0..a_M; a_0 and a_1 are ignored. Returns an array indexed by
    power with f[0] = 0.
    """
    a = np.asarray(a, dtype=float)
    top = len(a) - 1
    if top < 2 or not a[2] > 0.0:
        raise DegenerateSaddle("need a2 > 0 to open the descent path")
    f = np.zeros(top, dtype=complex)
    f[1] = -1j * math.sqrt(a[2])
    for m in range(2, top):
        acc = a[m + 1] + sum(f[j] * f[m + 1 - j] for j in range(2, m))
        f[m] = -acc / (2.0 * f[1])
    return f


def power_coefficients(f: np.ndarray, power: int, top: int) -> np.ndarray:
    """[t^m] f(t)^power for m <= top, f[0] = 0, by the power recurrence."""
    f1 = f[1]
    ratio = np.zeros(top + 1, dtype=complex)
    for j in range(1, min(len(f) - 1, top + 1)):
        ratio[j] = f[j + 1] / f1
    scaled = np.zeros(top + 1, dtype=complex)
    scaled[0] = 1.0
    for j in range(1, top + 1):
        scaled[j] = sum(
            ((power + 1) * i - j) * ratio[i] * scaled[j - i] for i in range(1, j + 1)
        ) / j
    out = np.zeros(top + 1, dtype=complex)
    head = f1**power
    for m in range(power, top + 1):
        out[m] = head * scaled[m - power]
    return out


def series_reversion(f: np.ndarray, s_star: float) -> np.ndarray:
    """Coefficients p_0..p_{M-1} of the path p(u) = s_star + t(u) with f(t(u)) = u."""
    f = np.asarray(f, dtype=complex)
    top = len(f) - 1
    if f[1] == 0:
        raise DegenerateSaddle("f1 vanishes; path reversion undefined")
    powers = [None] + [power_coefficients(f, k, top) for k in range(1, top + 1)]
    tau = np.zeros(top + 1, dtype=complex)
    tau[1] = 1.0 / f[1]
    for m in range(2, top + 1):
        acc = sum(tau[k] * powers[k][m] for k in range(1, m))
        tau[m] = -acc / powers[m][m]
    p = tau.copy()
    p[0] = s_star
    return p


def series_ratio(p: np.ndarray, pole_offset: float) -> np.ndarray:
    """Coefficients of c(u) = p'(u) / (p(u) - pole_offset)."""
    p = np.asarray(p, dtype=complex)
    d0 = p[0] - pole_offset
    if d0 == 0:
        raise PoleAtSaddle("saddle coincides with the pole")
    top = len(p) - 2
    c = np.zeros(top + 1, dtype=complex)
    for m in range(top + 1):
        acc = (m + 1) * p[m + 1] - sum(p[ell] * c[m - ell] for ell in range(1, m + 1))
        c[m] = acc / d0
    return c


def descent_coefficients(a: Sequence[float], s_star: float, pole_offset: float) -> np.ndarray:
    """Chain of the three recursions: exponent Taylor data to c-coefficients."""
    f = series_sqrt_invert(a)
    p = series_reversion(f, s_star)
    return series_ratio(p, pole_offset)


def split_pole(p: Sequence[complex], pole_offset: float) -> Tuple[complex, np.ndarray]:
    """Pole of the truncated c(u) near the origin and the quotient h(u).

    The cubic d(u) = p(u) - pole_offset factors as (u - u_p) h(u); u_p lies on
    the imaginary axis. Only meaningful while |u_p| is small against the radius
    of the path series.
    """
    d = np.zeros(4, dtype=complex)
    coeffs = np.asarray(p, dtype=complex)[:4]
    d[: len(coeffs)] = coeffs
    d[0] = coeffs[0].real - pole_offset
    if d[1] == 0:
        raise DegenerateSaddle("p1 vanishes; pole split undefined")
    root = -d[0] / d[1]
    for _ in range(_SPLIT_NEWTON):
        value = d[0] + root * (d[1] + root * (d[2] + root * d[3]))
        slope = d[1] + root * (2.0 * d[2] + 3.0 * root * d[3])
        step = value / slope
        root -= step
        if abs(step) <= 1e-16 * max(abs(root), 1e-300):
            break
    h = np.zeros(3, dtype=complex)
    h[2] = d[3]
    h[1] = d[2] + root * h[2]
    h[0] = d[1] + root * h[1]
    return complex(0.0, root.imag), h


def quotient_log_derivative(h: np.ndarray) -> Tuple[complex, complex]:
    """Coefficients of u^0 and u^2 in h'(u)/h(u) for a quadratic h."""
    e1, e2 = h[1] / h[0], h[2] / h[0]
    return complex(e1), complex(e1**3 - 3.0 * e1 * e2)
