"""Numerical integration along the steepest-descent path.

The path through the saddle is the solution s(u) of
``alpha(s) = alpha(s_star) - u**2`` with ``Im s(u) > 0`` for ``u > 0``;
the lower half follows by conjugation, so only u >= 0 is traced.

The pole of c(u) at u = i w is subtracted and integrated in closed form,
so the quadrature only sees the smooth remainder.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import PathDiverged, PoleAtSaddle, QuadratureFailure
from .asymptotic import (
    LOWER_TAIL,
    combine_pole_terms,
    pole_gap,
    pole_term,
    second_order_g,
)
from .kernel import DescentSample, ExponentKernel, SaddleSolution
from .series import series_reversion, series_sqrt_invert, split_pole

logger = logging.getLogger(__name__)

# e^{-n umax^2 / 2} < 1e-18
GAUSS_TAIL_EXPONENT = 41.5
SERIES_U = 1e-4
NODES_PER_PANEL = 20
_MAX_PANELS = 512
_NEWTON_ITERS = 40
_MAX_HALVINGS = 30
# below this pole gap [0, _NEAR_POLE_U] is integrated on the series model
_NEAR_POLE_U = 3e-3
_NEAR_NODES = 40


def descent_umax(n: int) -> float:
    return math.sqrt(2.0 * GAUSS_TAIL_EXPONENT / n)


@dataclass(frozen=True)
class DescentIntegral:
    log_p: float
    residue_active: bool
    # (1/pi) int_0^umax Im c(u) e^{-n u^2/2} du, principal value when the pole is on the path
    integral: float
    panels: int
    samples: Tuple[DescentSample, ...]


@lru_cache(maxsize=None)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


class _PathTracer:
    def __init__(self, kernel: ExponentKernel, saddle: SaddleSolution, pole_offset: float):
        self.kernel = kernel
        self.saddle = saddle
        self.pole_offset = pole_offset
        a = [saddle.alpha_at, 0.0, *saddle.a_coeffs]
        self.p = series_reversion(series_sqrt_invert(a), saddle.s_star)
        self.dp = np.arange(1, len(self.p)) * self.p[1:]
        self.scale = max(1.0, abs(saddle.alpha_at))

    def series_point(self, u: float) -> complex:
        return complex(np.polyval(self.p[::-1], u))

    def series_c(self, u: float) -> complex:
        offset = (self.saddle.s_star - self.pole_offset) + complex(
            np.polyval(self.p[:0:-1], u) * u
        )
        if offset == 0.0:
            raise PoleAtSaddle("descent path sampled at the pole")
        return complex(np.polyval(self.dp[::-1], u)) / offset

    def c_at(self, u: float, s: complex) -> complex:
        slope = -2.0 * u / complex(self.kernel.deriv(s, 1))
        return slope / (s - self.pole_offset)

    def _newton(self, u: float, guess: complex) -> Optional[complex]:
        target = self.saddle.alpha_at - u * u
        tol = 1e-13 * max(self.scale, u * u)
        s = guess
        residual = math.inf
        if self.kernel.contains(s):
            residual = abs(complex(self.kernel.value(s)) - target)
        for _ in range(_NEWTON_ITERS):
            if residual <= tol:
                return s
            value = complex(self.kernel.value(s)) - target
            step = value / complex(self.kernel.deriv(s, 1))
            damping = 1.0
            while damping > 1e-6:
                candidate = s - damping * step
                if self.kernel.contains(candidate):
                    new_residual = abs(complex(self.kernel.value(candidate)) - target)
                    if new_residual < residual or new_residual <= tol:
                        break
                damping *= 0.5
            else:
                return None
            s, residual = candidate, new_residual
        return s if residual <= 100.0 * tol else None

    def polish(self, u: float, s: complex) -> complex:
        """One more Newton step; c(u) amplifies the residual left by the tolerance."""
        slope = complex(self.kernel.deriv(s, 1))
        if slope == 0.0:
            return s
        candidate = s - (complex(self.kernel.value(s)) - (self.saddle.alpha_at - u * u)) / slope
        if self.kernel.contains(candidate) and candidate.imag > 0.0:
            return candidate
        return s

    def advance(self, u_prev: float, s_prev: complex, u: float) -> complex:
        if u <= SERIES_U:
            return self.series_point(u)
        if u_prev <= SERIES_U:
            guess = self.series_point(u)
        else:
            slope = -2.0 * u_prev / complex(self.kernel.deriv(s_prev, 1))
            guess = s_prev + (u - u_prev) * slope
        solved = self._newton(u, guess)
        if solved is not None and solved.imag > 0.0:
            return solved
        # backtrack through intermediate points
        for halving in range(1, _MAX_HALVINGS + 1):
            pieces = 2**halving
            u_last, s_last = u_prev, s_prev
            ok = True
            for k in range(1, pieces + 1):
                u_k = u_prev + (u - u_prev) * k / pieces
                if u_last <= SERIES_U:
                    guess = self.series_point(u_k)
                else:
                    slope = -2.0 * u_last / complex(self.kernel.deriv(s_last, 1))
                    guess = s_last + (u_k - u_last) * slope
                s_k = self._newton(u_k, guess)
                if s_k is None or s_k.imag <= 0.0:
                    ok = False
                    break
                u_last, s_last = u_k, s_k
            if ok:
                return s_last
        raise PathDiverged(f"descent path continuation failed at u={u:g}", u=u)

    def trace(self, u_grid: Sequence[float]) -> List[DescentSample]:
        samples: List[DescentSample] = []
        u_prev, s_prev = 0.0, complex(self.saddle.s_star)
        for u in u_grid:
            u = float(u)
            if u < u_prev:
                raise ValueError("u_grid must be increasing")
            if u == 0.0:
                samples.append(DescentSample(0.0, complex(self.saddle.s_star), self.series_c(0.0)))
                continue
            s = self.advance(u_prev, s_prev, u)
            if u > SERIES_U:
                s = self.polish(u, s)
            c_val = self.series_c(u) if u <= SERIES_U else self.c_at(u, s)
            samples.append(DescentSample(u, s, c_val))
            u_prev, s_prev = u, s
        return samples


def trace_descent_path(
    kernel: ExponentKernel,
    saddle: SaddleSolution,
    u_grid: Sequence[float],
    pole_offset: float = 0.0,
) -> List[DescentSample]:
    """Samples of the descent path and of c(u) = p'(u) / (p(u) - pole_offset)."""
    return _PathTracer(kernel, saddle, pole_offset).trace(u_grid)


def _panel_nodes(lo: float, hi: float, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = _legendre(NODES_PER_PANEL)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _near_pole_segment(tracer: _PathTracer, n: int, width: float) -> Tuple[float, float]:
    """Pole gap and remainder integral over [0, width] from the split path series.

    Newton-traced values of c lose all digits to cancellation this close
    to a pole sitting next to the saddle; the cubic path series does not.
    """
    u_pole, h = split_pole(tracer.p, tracer.pole_offset)
    x, w = _legendre(_NEAR_NODES)
    nodes = 0.5 * width * (x + 1.0)
    weights = 0.5 * width * w
    smooth = (h[1] + 2.0 * h[2] * nodes) / (h[0] + nodes * (h[1] + h[2] * nodes))
    part = float(np.sum(weights * smooth.imag * np.exp(-0.5 * n * nodes**2))) / math.pi
    return u_pole.imag, part


def integrate_descent(
    kernel: ExponentKernel,
    saddle: SaddleSolution,
    n: int,
    pole_offset: float = 0.0,
    tail: int = LOWER_TAIL,
    rtol: float = 1e-10,
) -> DescentIntegral:
    """ln P from the descent-path integral, residue included when it fires."""
    alpha_at_pole = (
        float(np.real(kernel.value(pole_offset))) if kernel.contains(pole_offset) else 0.0
    )
    gap = pole_gap(saddle, pole_offset, alpha_at_pole)
    tracer = _PathTracer(kernel, saddle, pole_offset)
    umax = descent_umax(n)
    lo, near_part = 0.0, 0.0
    if abs(gap) < _NEAR_POLE_U:
        lo = min(_NEAR_POLE_U, umax)
        gap, near_part = _near_pole_segment(tracer, n, lo)
    pole = pole_term(gap, n)
    panels = 8
    previous = None
    while True:
        nodes, weights = _panel_nodes(lo, umax, panels)
        samples = tracer.trace(nodes)
        im_c = np.array([sample.c_val.imag for sample in samples])
        smooth = im_c - gap / (nodes**2 + gap**2)
        remainder = near_part + float(
            np.sum(weights * smooth * np.exp(-0.5 * n * nodes**2))
        ) / math.pi
        if previous is not None and abs(remainder - previous) <= rtol * max(
            abs(remainder), pole
        ):
            break
        if panels >= _MAX_PANELS:
            raise QuadratureFailure(
                f"descent quadrature not converged with {panels} panels"
            )
        previous = remainder
        panels *= 2

    log_p, residue = combine_pole_terms(saddle.alpha_at, n, gap, tail, remainder)
    if math.isnan(log_p):
        raise QuadratureFailure("descent integral does not give a probability")
    integral = math.copysign(pole, gap) + remainder if gap != 0.0 else remainder
    logger.debug(
        "[descent] s=%s n=%s panels=%s log_p=%s residue=%s",
        saddle.s_star,
        n,
        panels,
        log_p,
        residue,
    )
    return DescentIntegral(log_p, residue, integral, panels, tuple(samples))


def certificate_grid(n: int, points: int = 200) -> np.ndarray:
    return np.linspace(0.0, descent_umax(n), points)


def certify_bracket(
    kernel: ExponentKernel,
    saddle: SaddleSolution,
    pole_offset: float,
    samples: Sequence[DescentSample],
    slack: float = 1e-9,
) -> bool:
    """Check 1 + g u^2 <= (s* - q) sqrt(a2) Im c(u) <= 1 on every sample."""
    g = second_order_g(saddle, pole_offset)
    scale = (saddle.s_star - pole_offset) * math.sqrt(saddle.a2)
    for sample in samples:
        normalized = scale * sample.c_val.imag
        if normalized > 1.0 + slack or normalized < 1.0 + g * sample.u**2 - slack:
            logger.debug(
                "[certificate] violated at u=%s value=%s g=%s", sample.u, normalized, g
            )
            return False
    return True
