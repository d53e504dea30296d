"""Special-function kernels shared by the channel modules.

Probabilities are carried as natural logs wherever they can underflow.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from scipy import special

from .errors import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2

_SERIES_NU_MAX = 50.0
_SERIES_CHUNK = 256
_SERIES_MAX_TERMS = 10_000


def _scalar_or_array(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def gauss_q(x: ArrayLike) -> ArrayLike:
    """Gaussian tail P{N(0,1) > x}."""
    return _scalar_or_array(0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0)))


def log_gauss_q(x: ArrayLike) -> ArrayLike:
    return _scalar_or_array(special.log_ndtr(-np.asarray(x, dtype=float)))


def gauss_q_inv(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError(f"gauss_q_inv needs 0 < p < 1, got {p!r}")
    return float(-special.ndtri(p))


def log_binom_pmf(n: int, d: ArrayLike, eps: float) -> ArrayLike:
    """ln[C(n,d) (1-eps)^(n-d) eps^d], vectorized over d."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"binomial parameter must lie in (0, 1), got {eps!r}")
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < 0) or np.any(d_arr > n):
        raise DomainError(f"need 0 <= d <= n={n}")
    value = (
        special.gammaln(n + 1.0)
        - special.gammaln(d_arr + 1.0)
        - special.gammaln(n - d_arr + 1.0)
        + special.xlogy(d_arr, eps)
        + special.xlog1py(n - d_arr, -eps)
    )
    return _scalar_or_array(value)


def binary_entropy(x: ArrayLike) -> ArrayLike:
    """Binary entropy in bits; endpoints map to 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise DomainError("binary_entropy needs 0 <= x <= 1")
    return _scalar_or_array((special.entr(x_arr) + special.entr(1.0 - x_arr)) * LOG2E)


@dataclass(frozen=True)
class BernoulliTable:
    # values[k] = B_{2k}; values[0] = B_0 = 1
    values: Tuple[float, ...]

    @property
    def kmax(self) -> int:
        return len(self.values) - 1

    def b2k(self, k: int) -> float:
        return self.values[k]


def _akiyama_tanigawa(m_max: int) -> list[Fraction]:
    row = [Fraction(0)] * (m_max + 1)
    numbers = []
    for m in range(m_max + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        numbers.append(row[0])
    return numbers


@lru_cache(maxsize=None)
def bernoulli_numbers(m_max: int) -> Tuple[Fraction, ...]:
    """Exact B_0..B_m_max (with the B_1 = -1/2 convention)."""
    numbers = _akiyama_tanigawa(m_max)
    if m_max >= 1:
        numbers[1] = -numbers[1]
    return tuple(numbers)


@lru_cache(maxsize=None)
def bernoulli_table(kmax: int = 30) -> BernoulliTable:
    numbers = bernoulli_numbers(2 * kmax)
    return BernoulliTable(values=tuple(float(numbers[2 * k]) for k in range(kmax + 1)))


def _log_hyp0f1_ratio_terms(nu: float, z: float, shift: int = 0) -> float:
    """ln 0F1(; nu + shift; z) by log-domain summation of the defining series."""
    if z == 0.0:
        return 0.0
    b = nu + shift
    log_z = math.log(z)
    total = -np.inf
    start = 0
    while start < _SERIES_MAX_TERMS:
        k = np.arange(start, start + _SERIES_CHUNK, dtype=float)
        log_terms = k * log_z - special.gammaln(k + 1.0) - (
            special.gammaln(b + k) - special.gammaln(b)
        )
        total = np.logaddexp(total, special.logsumexp(log_terms))
        # terms grow up to k ~ sqrt(z) before decaying
        if log_terms[-1] < log_terms[-2] and log_terms[-1] - total < math.log(1e-16):
            return float(total)
        start += _SERIES_CHUNK
    logger.warning("[g_nu] 0F1 series hit %s terms at nu=%s z=%s", start, nu, z)
    return float(total)


def _g_nu_series(nu: float, s: float, order: int) -> float:
    z = (0.5 * nu * s) ** 2
    log_f0 = _log_hyp0f1_ratio_terms(nu, z)
    if order == 0:
        return log_f0 / nu
    # dF/dz = F(nu+1)/nu, d2F/dz2 = F(nu+2)/(nu(nu+1))
    r1 = math.exp(_log_hyp0f1_ratio_terms(nu, z, 1) - log_f0) / nu
    dz = 0.5 * nu * nu * s
    if order == 1:
        return r1 * dz / nu
    r2 = math.exp(_log_hyp0f1_ratio_terms(nu, z, 2) - log_f0) / (nu * (nu + 1.0))
    d2z = 0.5 * nu * nu
    return ((r2 - r1 * r1) * dz * dz + r1 * d2z) / nu


def _g_nu_asymptotic(nu: float, s: float, order: int) -> float:
    r = math.sqrt(1.0 + s * s)
    inv = 1.0 / nu
    if order == 0:
        return r - 1.0 - 0.5 * inv * math.log(r) - (1.0 - inv) * math.log(0.5 * (1.0 + r))
    if order == 1:
        return s / r - 0.5 * inv * s / (r * r) - (1.0 - inv) * (s / r) / (1.0 + r)
    return (
        1.0 / r**3
        - 0.5 * inv * (1.0 - s * s) / r**4
        - (1.0 - inv) * ((1.0 + r) / r**3 - s * s / (r * r)) / (1.0 + r) ** 2
    )


def _resolve_g_method(nu: float, method: str) -> str:
    if nu < 1.0:
        raise DomainError(f"G_nu needs nu >= 1, got {nu!r}")
    if method == "auto":
        return "series" if nu <= _SERIES_NU_MAX else "asymptotic"
    if method not in ("series", "asymptotic"):
        raise ValueError(f"Unknown G_nu method: {method}")
    return method


def g_nu(nu: float, s: float, method: str = "auto") -> float:
    """G_nu(s) = (1/nu) ln 0F1(; nu; (nu s / 2)^2)."""
    if _resolve_g_method(nu, method) == "series":
        return _g_nu_series(nu, s, 0)
    return _g_nu_asymptotic(nu, s, 0)


def g_nu_deriv(nu: float, s: float, order: int, method: str = "auto") -> float:
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if _resolve_g_method(nu, method) == "series":
        return _g_nu_series(nu, s, order)
    return _g_nu_asymptotic(nu, s, order)


def g_infinity(s: float) -> float:
    r = math.sqrt(1.0 + s * s)
    return r - 1.0 - math.log(0.5 * (1.0 + r))
