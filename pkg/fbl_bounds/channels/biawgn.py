"""Binary-input AWGN channel.

Everything is expressed through h(x) = ln(1 + e^{-2x}) with x ~ N(Omega, Omega),
the half log-likelihood-ratio seen by the decoder, and through its transform
H(s) = E[exp(-s h(x))], evaluated by Gauss-Hermite quadrature.

The integral method needs a moderate blocklength: for n below about 10 the
descent path runs into the edge of the strip and PathDiverged is raised
(at n = 5 this happens for every threshold tried); use asym1/asym2 there.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import integrate

from ..config import DEFAULT_AGREEMENT_TOL
from ..errors import DomainError
from ..laplace import ExponentKernel, SaddleSolution, ShiftedKernel, find_saddle
from ..query import BoundQuery, BoundResult, Method
from ..specfun import LN2
from ..specs import BiAwgnSpec
from .base import FaMdResult, LaplaceChannel

logger = logging.getLogger(__name__)

_MC_CHUNK_VALUES = 1 << 22


@lru_cache(maxsize=16)
def _hermite(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    return nodes, weights / math.sqrt(math.pi)


def h_llr(x):
    """ln(1 + e^{-2x}) without overflow for large negative x."""
    return np.logaddexp(0.0, -2.0 * np.asarray(x, dtype=float))


@lru_cache(maxsize=64)
def _h_nodes(snr: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = _hermite(order)
    x = snr + math.sqrt(2.0 * snr) * nodes
    return h_llr(x), weights


def _tilted_moments(spec: BiAwgnSpec, s):
    """log H(s) and central moments 2..4 of -h under the tilted weights."""
    h, w = _h_nodes(spec.snr_Omega, spec.quadrature_order)
    s = np.asarray(s)
    exponent = -s[..., None] * h
    shift = np.max(np.real(exponent), axis=-1, keepdims=True)
    tilted = w * np.exp(exponent - shift)
    total = np.sum(tilted, axis=-1, keepdims=True)
    log_h = np.log(total[..., 0]) + shift[..., 0]
    probs = tilted / total
    mean = np.sum(probs * -h, axis=-1)
    dev = -h - mean[..., None]
    m2 = np.sum(probs * dev**2, axis=-1)
    m3 = np.sum(probs * dev**3, axis=-1)
    m4 = np.sum(probs * dev**4, axis=-1)
    return log_h, mean, m2, m3, m4 - 3.0 * m2 * m2


def _scalar(value):
    return value[()] if np.ndim(value) == 0 else value


def h_transform(s, ell: int, spec: BiAwgnSpec):
    """H^(ell)(s) = E[exp(-s h) (-h)^ell]."""
    if ell not in range(5):
        raise ValueError("ell must be in 0..4")
    h, w = _h_nodes(spec.snr_Omega, spec.quadrature_order)
    s = np.asarray(s)
    out = np.sum(w * np.exp(-s[..., None] * h) * (-h) ** ell, axis=-1)
    return _scalar(out)


def biawgn_capacity(spec: BiAwgnSpec) -> float:
    """1 - E[log2(1 + e^{-2x})] by adaptive quadrature on the Gaussian density."""
    snr = spec.snr_Omega
    root = math.sqrt(snr)

    def integrand(z: float) -> float:
        return float(h_llr(snr + root * z)) * math.exp(-0.5 * z * z)

    value, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-14, epsrel=1e-12)
    return 1.0 - value / math.sqrt(2.0 * math.pi) / LN2


def biawgn_capacity_from_transform(spec: BiAwgnSpec) -> float:
    return 1.0 + float(h_transform(0.0, 1, spec)) / LN2


def biawgn_dispersion(spec: BiAwgnSpec) -> float:
    """Variance of h(x), in nats^2."""
    _, _, m2, _, _ = _tilted_moments(spec, 0.0)
    return float(np.real(m2))


class BiAwgnBetaKernel(ExponentKernel):
    """beta(s) = 2 (lambda s + ln H(s)); H is entire so the strip is the plane."""

    def __init__(self, spec: BiAwgnSpec, lam: float) -> None:
        self.spec = spec
        self.lam = float(lam)

    @property
    def strip(self) -> Tuple[float, float]:
        return -math.inf, math.inf

    def value(self, s):
        log_h = _tilted_moments(self.spec, s)[0]
        return _scalar(2.0 * (self.lam * np.asarray(s) + log_h))

    def deriv(self, s, order: int):
        _, mean, k2, k3, k4 = _tilted_moments(self.spec, s)
        if order == 1:
            return _scalar(2.0 * (self.lam + mean))
        if order in (2, 3, 4):
            return _scalar(2.0 * {2: k2, 3: k3, 4: k4}[order])
        raise ValueError("order must be in 1..4")


def biawgn_kernel(spec: BiAwgnSpec, lam: float) -> Tuple[ExponentKernel, ExponentKernel]:
    """(alpha, beta) with alpha(s) = beta(s - 1) - 2 ln 2 + 2 lambda."""
    if not lam > 0.0:
        raise DomainError(f"threshold must be positive, got {lam!r}")
    beta = BiAwgnBetaKernel(spec, lam)
    return ShiftedKernel(beta, -1.0, 2.0 * lam - 2.0 * LN2), beta


class BiAwgnChannel(LaplaceChannel):
    name = "biawgn"
    lambda_floor = 0.0

    def __init__(self, spec: BiAwgnSpec, agreement_tol: float = DEFAULT_AGREEMENT_TOL) -> None:
        self.spec = spec
        self.agreement_tol = agreement_tol

    def capacity(self) -> float:
        return biawgn_capacity(self.spec)

    def dispersion(self) -> float:
        return biawgn_dispersion(self.spec)

    def kernels(self, lam: float) -> Tuple[ExponentKernel, ExponentKernel]:
        return biawgn_kernel(self.spec, lam)

    def saddles(self, lam: float) -> Tuple[SaddleSolution, SaddleSolution]:
        _, beta = self.kernels(lam)
        sb = find_saddle(beta)
        return sb.shifted(-1.0, 2.0 * lam - 2.0 * LN2), sb

    def lambda_centres(self) -> Tuple[float, float]:
        md_centre = -float(h_transform(0.0, 1, self.spec))
        fa_centre = -float(h_transform(-1.0, 1, self.spec) / h_transform(-1.0, 0, self.spec))
        return md_centre, fa_centre

    def certificate_available(self) -> bool:
        return False

    def orders_agree(self, bracket: Tuple[float, float]) -> bool:
        lo, hi = bracket
        if not (math.isfinite(lo) and math.isfinite(hi)):
            return False
        return abs(hi - lo) <= self.agreement_tol * max(abs(lo), abs(hi))

    def sample_statistics(self, n: int, samples: int, rng: np.random.Generator):
        snr = self.spec.snr_Omega
        root = math.sqrt(snr)
        chunk = max(1, _MC_CHUNK_VALUES // n)
        fa = np.empty(samples)
        md = np.empty(samples)
        for start in range(0, samples, chunk):
            rows = min(chunk, samples - start)
            signs = rng.choice((-1.0, 1.0), size=(rows, n))
            u = signs * snr + root * rng.standard_normal((rows, n))
            v = snr + root * rng.standard_normal((rows, n))
            fa[start : start + rows] = h_llr(u).mean(axis=1)
            md[start : start + rows] = h_llr(v).mean(axis=1)
        return fa, md

    def converse(self, query: BoundQuery) -> BoundResult:
        result = super().converse(query)
        if result.bracket is not None:
            # no certificate here: order agreement is the acceptance rule
            log_bracket = _log_bracket(query, result.bracket)
            result.diagnostics["orders_agree"] = self.orders_agree(log_bracket)
        return result


def _log_bracket(query: BoundQuery, bracket: Tuple[float, float]) -> Tuple[float, float]:
    """Bracket on the log-probability scale used for the agreement rule."""
    if query.pe is not None:
        return tuple(-r * query.n * LN2 for r in bracket)
    return tuple(math.log(p) if p > 0.0 else -math.inf for p in bracket)


def biawgn_fa_md(
    n: int,
    lam: float,
    spec: BiAwgnSpec,
    method: Method | str = Method.ASYM2,
    *,
    samples: int = 1_000_000,
    seed: int = 0,
) -> FaMdResult:
    return BiAwgnChannel(spec).fa_md(n, lam, method, samples=samples, seed=seed)


def biawgn_converse(query: BoundQuery) -> BoundResult:
    return BiAwgnChannel(query.channel).converse(query)


def kappa_beta(query: BoundQuery, alpha_split: float | None = None) -> BoundResult:
    return BiAwgnChannel(query.channel).kappa_beta(query, alpha_split=alpha_split)
