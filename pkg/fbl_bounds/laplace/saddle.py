from __future__ import annotations

import logging
import math
from typing import Optional

from scipy import optimize

from ..errors import DegenerateSaddle, NoSaddle
from .kernel import ExponentKernel, SaddleSolution

logger = logging.getLogger(__name__)

_STRIP_PAD = 1e-9
_SEARCH_LIMIT = 1e4


def _derivative(kernel: ExponentKernel, s: float) -> float:
    return float(kernel.deriv(s, 1).real)


def _padded(edge: float, inward: float) -> Optional[float]:
    if not math.isfinite(edge):
        return None
    return edge + inward * _STRIP_PAD * max(1.0, abs(edge))


def _start_point(lo: Optional[float], hi: Optional[float]) -> float:
    if (lo is None or lo < 0.0) and (hi is None or hi > 0.0):
        return 0.0
    if lo is not None and hi is not None:
        return 0.5 * (lo + hi)
    return lo + 1.0 if lo is not None else hi - 1.0


def _walk(kernel: ExponentKernel, start: float, edge: Optional[float], direction: int) -> float:
    """Step away from start until alpha' has the sign expected on that side."""
    point, step = start, 1.0
    wrong_sign = (lambda v: v > 0.0) if direction < 0 else (lambda v: v < 0.0)
    while wrong_sign(_derivative(kernel, point)):
        candidate = point + direction * step
        if edge is not None and (candidate - edge) * direction >= 0.0:
            candidate = edge
        point = candidate
        if point == edge or abs(point) > _SEARCH_LIMIT:
            if wrong_sign(_derivative(kernel, point)):
                raise NoSaddle(f"alpha' keeps one sign up to s={point:g}")
            break
        step *= 2.0
    return point


def find_saddle(kernel: ExponentKernel) -> SaddleSolution:
    """Real root of alpha' on the convergence strip."""
    lo_strip, hi_strip = kernel.strip
    lo, hi = _padded(lo_strip, 1.0), _padded(hi_strip, -1.0)
    start = _start_point(lo, hi)
    left = _walk(kernel, start, lo, -1)
    right = _walk(kernel, start, hi, +1)

    if left == right:
        s_star = left
    else:
        result = optimize.root_scalar(
            lambda s: _derivative(kernel, s),
            bracket=(left, right),
            method="brentq",
            xtol=1e-15,
            rtol=1e-15,
        )
        s_star = float(result.root)

    # Newton polish on the convex section
    for _ in range(3):
        curvature = float(kernel.deriv(s_star, 2).real)
        if curvature <= 0.0:
            break
        step = _derivative(kernel, s_star) / curvature
        if abs(step) < 1e-17 * max(1.0, abs(s_star)):
            break
        candidate = s_star - step
        if left <= candidate <= right:
            s_star = candidate

    coeffs = kernel.taylor(s_star, 4)
    a2, a3, a4 = float(coeffs[2]), float(coeffs[3]), float(coeffs[4])
    if not a2 > 0.0:
        raise DegenerateSaddle(f"non-positive curvature a2={a2:g} at s={s_star:g}")
    residual = abs(_derivative(kernel, s_star))
    if residual > 1e-12 * max(1.0, 2.0 * a2):
        raise NoSaddle(f"alpha' residual {residual:.3g} at s={s_star:g} after polishing")
    return SaddleSolution(
        s_star=s_star, alpha_at=float(coeffs[0]), a_coeffs=(a2, a3, a4)
    )
