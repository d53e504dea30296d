from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Tuple

from scipy import special

from ..errors import NumericalFailure, PoleAtSaddle, SecondOrderInvalid
from .kernel import ProbabilityBracket, SaddleSolution
from .series import (
    quotient_log_derivative,
    series_ratio,
    series_reversion,
    series_sqrt_invert,
    split_pole,
)

logger = logging.getLogger(__name__)

LOWER_TAIL = 1
UPPER_TAIL = -1

# saddles closer to the pole than this many standard deviations use the uniform form
UNIFORM_ZONE = 2.5
# |s* - pole| sqrt(a2) below which the pole gap comes from the Taylor data
_GAP_TAYLOR = 1e-2
# pole gaps below which the pole is split off the truncated path series
SPLIT_GAP = 0.05


def second_order_g(saddle: SaddleSolution, pole_offset: float = 0.0) -> float:
    """Relative n^-1 correction g with P2 = P1 (1 + g/n)."""
    a2, a3, a4 = saddle.a_coeffs
    sigma = saddle.s_star - pole_offset
    if sigma == 0.0:
        raise PoleAtSaddle("saddle coincides with the pole")
    return (
        (12.0 * a2 * a4 - 15.0 * a3 * a3) / (8.0 * a2**3)
        - 3.0 * a3 / (2.0 * a2 * a2 * sigma)
        - 1.0 / (a2 * sigma * sigma)
    )


def order1_log_prob(saddle: SaddleSolution, n: int, pole_offset: float = 0.0) -> float:
    sigma = saddle.s_star - pole_offset
    if sigma == 0.0:
        raise PoleAtSaddle("saddle coincides with the pole")
    return 0.5 * n * saddle.alpha_at - 0.5 * math.log(
        2.0 * math.pi * n * saddle.a2 * sigma * sigma
    )


def asymptotic_log_prob(
    saddle: SaddleSolution,
    n: int,
    pole_offset: float = 0.0,
    c_coeffs: Optional[Sequence[complex]] = None,
) -> Tuple[float, float]:
    """Order-1 and order-2 log values of the saddle contribution.

    With ``c_coeffs`` (indexed by power) the order-2 factor uses c2/c0,
    otherwise the closed form of ``second_order_g``.
    """
    log_p1 = order1_log_prob(saddle, n, pole_offset)
    if c_coeffs is not None:
        g = float((c_coeffs[2] / c_coeffs[0]).real)
    else:
        g = second_order_g(saddle, pole_offset)
    factor = 1.0 + g / n
    if factor <= 0.0:
        raise SecondOrderInvalid(f"1 + g/n = {factor:g} at n={n} (g={g:g})")
    return log_p1, log_p1 + math.log(factor)


def _complement(log_tail: float) -> float:
    if log_tail >= 0.0:
        return -math.inf
    return math.log1p(-math.exp(log_tail))


def residue_fires(s_star: float, pole_offset: float, tail: int) -> bool:
    """Whether the pole lies between the Bromwich line and the saddle."""
    if tail == LOWER_TAIL:
        return s_star < pole_offset
    return s_star > pole_offset


def pole_gap(saddle: SaddleSolution, pole_offset: float = 0.0, alpha_at_pole: float = 0.0) -> float:
    """Signed w with alpha(pole) - alpha(s*) = w^2; c(u) has its pole at u = i w.

    w carries the sign of s* - pole.
    """
    sigma = saddle.s_star - pole_offset
    if sigma == 0.0:
        return 0.0
    a2, a3, a4 = saddle.a_coeffs
    if abs(sigma) * math.sqrt(a2) <= _GAP_TAYLOR:
        gap2 = sigma * sigma * (a2 - a3 * sigma + a4 * sigma * sigma)
    else:
        gap2 = alpha_at_pole - saddle.alpha_at
    if not gap2 > 0.0:
        gap2 = a2 * sigma * sigma
    return math.copysign(math.sqrt(gap2), sigma)


def pole_term(gap: float, n: int) -> float:
    """(1/pi) int_0^inf |w| / (u^2 + w^2) e^{-n u^2/2} du in closed form."""
    if gap == 0.0:
        return 0.5
    return 0.5 * float(special.erfcx(abs(gap) * math.sqrt(0.5 * n)))


def combine_pole_terms(
    alpha_at: float, n: int, gap: float, tail: int, remainder: float
) -> Tuple[float, bool]:
    """ln P from the closed-form pole term and the smooth remainder.

    ``remainder`` is (1/pi) int_0^inf Im r(u) e^{-n u^2/2} du where
    r(u) = c(u) - 1/(u - i gap). At gap = 0 the pole sits on the path and
    contributes half its residue. Returns (ln P, residue fired); ln P is nan
    when the pieces do not form a probability.
    """
    if gap == 0.0:
        value = 0.5 + tail * math.exp(0.5 * n * alpha_at) * remainder
        return (math.log(value) if 0.0 < value < 1.0 else math.nan), False
    side = 1.0 if gap > 0.0 else -1.0
    magnitude = pole_term(gap, n) + side * remainder
    residue = residue_fires(gap, 0.0, tail)
    if not magnitude > 0.0:
        return math.nan, residue
    log_abs = 0.5 * n * alpha_at + math.log(magnitude)
    if log_abs >= 0.0:
        return math.nan, residue
    if residue:
        return math.log1p(-math.exp(log_abs)), True
    return log_abs, False


def _path_series(saddle: SaddleSolution):
    return series_reversion(
        series_sqrt_invert([saddle.alpha_at, 0.0, *saddle.a_coeffs]), saddle.s_star
    )


def uniform_bracket(
    saddle: SaddleSolution,
    n: int,
    pole_offset: float = 0.0,
    tail: int = LOWER_TAIL,
    alpha_at_pole: float = 0.0,
) -> ProbabilityBracket:
    """Order-1/order-2 values with the pole split off, valid as s* meets the pole.

    The remainder r(u) = c(u) - 1/(u - i w) is expanded as rho0 + rho2 u^2;
    the pole term is kept in closed form.
    """
    gap = pole_gap(saddle, pole_offset, alpha_at_pole)
    p = _path_series(saddle)
    if abs(gap) < SPLIT_GAP:
        u_pole, h = split_pole(p, pole_offset)
        r0, r2 = quotient_log_derivative(h)
        gap = u_pole.imag
        rho0, rho2 = r0.imag, r2.imag
    else:
        c = series_ratio(p, pole_offset)
        rho0 = c[0].imag - 1.0 / gap
        rho2 = c[2].imag + 1.0 / gap**3
    norm = 1.0 / math.sqrt(2.0 * math.pi * n)
    log_p1, residue = combine_pole_terms(saddle.alpha_at, n, gap, tail, rho0 * norm)
    log_p2, _ = combine_pole_terms(saddle.alpha_at, n, gap, tail, (rho0 + rho2 / n) * norm)
    if math.isnan(log_p1):
        raise NumericalFailure(f"uniform expansion left [0, 1] at s={saddle.s_star:g}, n={n}")
    if math.isnan(log_p2):
        logger.debug("[asymptotic] uniform order 2 out of range at n=%s", n)
        log_p2 = -math.inf
    return ProbabilityBracket(
        log_p1, log_p2, certified=False, residue_active=residue, uniform=True
    )


def bracket_from_saddle(
    saddle: SaddleSolution,
    n: int,
    pole_offset: float = 0.0,
    tail: int = LOWER_TAIL,
    c_coeffs: Optional[Sequence[complex]] = None,
    alpha_at_pole: float = 0.0,
) -> ProbabilityBracket:
    """Order-1/order-2 values with the complement switch applied.

    ``tail`` is LOWER_TAIL for false-alarm type probabilities P{X <= t}
    and UPPER_TAIL for missed-detection type P{X > t}. Saddles within
    UNIFORM_ZONE standard deviations of the pole go through ``uniform_bracket``.
    """
    if abs(pole_gap(saddle, pole_offset, alpha_at_pole)) * math.sqrt(n) < UNIFORM_ZONE:
        return uniform_bracket(saddle, n, pole_offset, tail, alpha_at_pole)
    residue = residue_fires(saddle.s_star, pole_offset, tail)
    try:
        log_p1, log_p2 = asymptotic_log_prob(saddle, n, pole_offset, c_coeffs)
    except SecondOrderInvalid as exc:
        logger.debug("[asymptotic] order-2 invalid, keeping order 1: %s", exc)
        log_p1 = order1_log_prob(saddle, n, pole_offset)
        log_p2 = -math.inf
    if residue:
        log_p1 = _complement(log_p1)
        log_p2 = _complement(log_p2) if math.isfinite(log_p2) else -math.inf
    return ProbabilityBracket(log_p1, log_p2, certified=False, residue_active=residue)
