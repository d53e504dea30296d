"""Meta-converse machinery for K parallel real AWGN sub-channels.

Sub-channel k carries n/K symbols at SNR Omega_k. Sub-channels with
Omega_k = 0 contribute a linear term to the exponent and no randomness.
"""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np
from scipy import stats

from ..config import DEFAULT_MC_SAMPLES
from ..errors import DomainError, Unsupported
from ..laplace import ExponentKernel, SaddleSolution, ShiftedKernel, find_saddle
from ..query import BoundQuery, BoundResult, Direction, Method
from ..specs import ParallelAwgnSpec
from .base import FaMdResult, LaplaceChannel

logger = logging.getLogger(__name__)

_MC_CHUNK = 1 << 16


class AwgnAlphaKernel(ExponentKernel):
    """alpha(s) = 2 lambda s - mean_k [2 s (1+O_k)/(1+2 s O_k) + ln(1+2 s O_k)]."""

    def __init__(self, snr: np.ndarray, lam: float) -> None:
        self.snr = np.asarray(snr, dtype=float)
        self.lam = float(lam)

    @property
    def strip(self) -> Tuple[float, float]:
        top = float(np.max(self.snr))
        return -1.0 / (2.0 * top), math.inf

    def _broadcast(self, s):
        s = np.asarray(s)
        return s[..., None], self.snr

    def value(self, s):
        sb, omega = self._broadcast(s)
        t = 1.0 + 2.0 * sb * omega
        terms = 2.0 * sb * (1.0 + omega) / t + np.log(t)
        out = 2.0 * self.lam * np.asarray(s) - np.mean(terms, axis=-1)
        return out[()] if np.ndim(out) == 0 else out

    def coefficient(self, s, m: int):
        """Taylor coefficient a_m at s for m >= 1."""
        sb, omega = self._broadcast(s)
        t = 1.0 + 2.0 * sb * omega
        ratio = -2.0 * omega / t
        terms = -2.0 * (1.0 + omega) / (t * t) * ratio ** (m - 1) + ratio**m / m
        out = np.mean(terms, axis=-1)
        if m == 1:
            out = out + 2.0 * self.lam
        return out[()] if np.ndim(out) == 0 else out

    def deriv(self, s, order: int):
        return math.factorial(order) * self.coefficient(s, order)

    def taylor(self, s: float, max_power: int) -> np.ndarray:
        coeffs = [float(np.real(self.value(s)))]
        coeffs += [float(np.real(self.coefficient(s, m))) for m in range(1, max_power + 1)]
        return np.asarray(coeffs)


def md_offset(snr: np.ndarray, lam: float) -> float:
    return float(np.mean(np.log1p(snr))) + 1.0 - lam


def awgn_alpha(spec: ParallelAwgnSpec, lam: float) -> AwgnAlphaKernel:
    if not lam > 0.0:
        raise DomainError(f"threshold must be positive, got {lam!r}")
    return AwgnAlphaKernel(np.asarray(spec.snr), lam)


def awgn_saddle(spec: ParallelAwgnSpec, lam: float) -> Tuple[SaddleSolution, SaddleSolution]:
    """Saddles of the false-alarm and missed-detection exponents.

    The MD exponent is the FA exponent shifted by 1/2, so one root serves both.
    """
    snr = np.asarray(spec.snr)
    sa = find_saddle(awgn_alpha(spec, lam))
    return sa, sa.shifted(0.5, md_offset(snr, lam))


def awgn_saddle_closed_form(snr: float, lam: float) -> float:
    """Single-channel FA saddle from the quadratic lambda t^2 - O t - (1+O) = 0."""
    t = (snr + math.sqrt(snr * snr + 4.0 * lam * (1.0 + snr))) / (2.0 * lam)
    return (t - 1.0) / (2.0 * snr)


def awgn_descent_path_closed_form(snr: float, lam: float, phi: np.ndarray) -> np.ndarray:
    """Single-channel FA descent path parameterised by its argument phi in (-pi, pi)."""
    phi = np.asarray(phi, dtype=float)
    sinc = np.sinc(phi / math.pi)
    radius = (1.0 + np.sqrt(1.0 + 4.0 * lam * (1.0 + snr) * sinc**2 / snr**2)) / (
        4.0 * lam * sinc
    )
    return radius * np.exp(1j * phi) - 1.0 / (2.0 * snr)


def awgn_capacity(spec: ParallelAwgnSpec) -> float:
    return float(np.mean(0.5 * np.log2(1.0 + np.asarray(spec.snr))))


def awgn_dispersion(spec: ParallelAwgnSpec) -> float:
    snr = np.asarray(spec.snr)
    return float(np.mean(snr * (2.0 + snr) / (2.0 * (1.0 + snr) ** 2)))


class AwgnChannel(LaplaceChannel):
    name = "awgn"
    lambda_floor = 0.0

    def __init__(self, spec: ParallelAwgnSpec) -> None:
        self.spec = spec
        self.snr = np.asarray(spec.snr, dtype=float)

    def capacity(self) -> float:
        return awgn_capacity(self.spec)

    def dispersion(self) -> float:
        return awgn_dispersion(self.spec)

    def kernels(self, lam: float) -> Tuple[ExponentKernel, ExponentKernel]:
        alpha = awgn_alpha(self.spec, lam)
        return alpha, ShiftedKernel(alpha, 0.5, md_offset(self.snr, lam))

    def saddles(self, lam: float) -> Tuple[SaddleSolution, SaddleSolution]:
        return awgn_saddle(self.spec, lam)

    def lambda_centres(self) -> Tuple[float, float]:
        return 1.0, float(np.mean(1.0 + 2.0 * self.snr))

    # statistic equal in law to a scaled non-central chi-square
    def has_exact(self) -> bool:
        active = self.snr[self.snr > 0.0]
        return bool(np.all(active == active[0]))

    def _exact_params(self, n: int) -> Tuple[float, int, float]:
        if not self.has_exact():
            raise Unsupported("exact evaluation needs equal SNR on the active sub-channels")
        active = self.snr[self.snr > 0.0]
        m = n // self.spec.K
        return float(active[0]), m * active.size, (self.snr.size - active.size) * m

    def exact_log_fa(self, n: int, lam: float) -> float:
        omega, df, shift = self._exact_params(n)
        nonc = df * (1.0 + omega) / omega
        return float(stats.ncx2.logcdf((n * lam - shift) / omega, df, nonc))

    def exact_log_md(self, n: int, lam: float) -> float:
        omega, df, shift = self._exact_params(n)
        nonc = df / omega
        return float(stats.ncx2.logsf((n * lam - shift) * (1.0 + omega) / omega, df, nonc))

    def sample_statistics(self, n: int, samples: int, rng: np.random.Generator):
        m = n // self.spec.K
        active = self.snr[self.snr > 0.0]
        fa = np.empty(samples)
        md = np.empty(samples)
        for start in range(0, samples, _MC_CHUNK):
            size = (min(_MC_CHUNK, samples - start), active.size)
            stop = start + size[0]
            u = stats.ncx2.rvs(m, m * (1.0 + active) / active, size=size, random_state=rng)
            v = stats.ncx2.rvs(m, m / active, size=size, random_state=rng)
            fa[start:stop] = u @ active / n
            md[start:stop] = v @ (active / (1.0 + active)) / n
        # zero-SNR sub-channels contribute m deterministically to both statistics
        offset = (self.snr.size - active.size) * m / n
        fa += offset
        md += offset
        return fa, md

    def achievability(self, query: BoundQuery) -> BoundResult:
        from .awgn_rcu import rcu_lambda, rcu_monte_carlo, rcu_pe, rcu_rate

        if self.spec.K != 1:
            raise Unsupported("the RCU bound is available for a single AWGN channel only")
        snr = float(self.snr[0])
        n, method = query.n, query.method
        diagnostics = {}
        if query.direction is Direction.RATE_GIVEN_PE:
            value = rcu_rate(n, query.pe, snr, method)
            log_pe = math.log(query.pe)
        elif method is Method.MONTE_CARLO:
            value, stderr = rcu_monte_carlo(
                n, query.rate, snr, query.samples or DEFAULT_MC_SAMPLES, query.seed
            )
            log_pe = math.log(value) if value > 0.0 else -math.inf
            diagnostics["stderr"] = stderr
        else:
            log_pe = rcu_pe(n, query.rate, snr, method)
            value = math.exp(log_pe)
            if method is not Method.EXACT:
                diagnostics["lambda"] = rcu_lambda(query.rate, n, snr)
        return BoundResult(
            query=query, value=value, method=method.value, log_pe=log_pe, diagnostics=diagnostics
        )


def _check_awgn_n(spec: ParallelAwgnSpec, n: int) -> None:
    if n < 1 or n % spec.K:
        raise DomainError(f"n={n} is not a positive multiple of K={spec.K}")


def awgn_fa_md(
    n: int,
    lam: float,
    spec: ParallelAwgnSpec,
    method: Method | str = Method.ASYM2,
    *,
    certify: bool = False,
    samples: int = 1_000_000,
    seed: int = 0,
) -> FaMdResult:
    _check_awgn_n(spec, n)
    return AwgnChannel(spec).fa_md(
        n, lam, method, certify=certify, samples=samples, seed=seed
    )


def awgn_converse(query: BoundQuery) -> BoundResult:
    return AwgnChannel(query.channel).converse(query)
