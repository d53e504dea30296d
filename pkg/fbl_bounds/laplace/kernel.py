from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np


class ExponentKernel(ABC):
    """Laplace-domain exponent alpha(s), analytic on a vertical strip.

    Implementations accept real or complex scalars and numpy arrays.
    """

    @property
    @abstractmethod
    def strip(self) -> Tuple[float, float]:
        """Open real interval of Re(s) where the transform converges."""
        raise NotImplementedError

    @abstractmethod
    def value(self, s):
        raise NotImplementedError

    @abstractmethod
    def deriv(self, s, order: int):
        """Derivative of the given order (1..4)."""
        raise NotImplementedError

    def taylor(self, s: float, max_power: int) -> np.ndarray:
        """Taylor coefficients a_0..a_max_power at s."""
        if max_power > 4:
            raise ValueError(
                f"{type(self).__name__} provides derivatives up to order 4 only"
            )
        coeffs = [self.value(s)]
        coeffs += [self.deriv(s, m) / math.factorial(m) for m in range(1, max_power + 1)]
        return np.real(np.asarray(coeffs, dtype=complex))

    def contains(self, s) -> bool:
        lo, hi = self.strip
        return lo < float(np.real(s)) < hi


class ShiftedKernel(ExponentKernel):
    """s -> base(s + shift) + offset."""

    def __init__(self, base: ExponentKernel, shift: float, offset: float) -> None:
        self.base = base
        self.shift = shift
        self.offset = offset

    @property
    def strip(self) -> Tuple[float, float]:
        lo, hi = self.base.strip
        return lo - self.shift, hi - self.shift

    def value(self, s):
        return self.base.value(s + self.shift) + self.offset

    def deriv(self, s, order: int):
        return self.base.deriv(s + self.shift, order)

    def taylor(self, s: float, max_power: int) -> np.ndarray:
        coeffs = np.array(self.base.taylor(s + self.shift, max_power), dtype=float)
        coeffs[0] += self.offset
        return coeffs


@dataclass(frozen=True)
class SaddleSolution:
    s_star: float
    alpha_at: float
    # a_2, a_3, a_4 (a_1 vanishes at the saddle)
    a_coeffs: Tuple[float, float, float]

    @property
    def a2(self) -> float:
        return self.a_coeffs[0]

    @property
    def a3(self) -> float:
        return self.a_coeffs[1]

    @property
    def a4(self) -> float:
        return self.a_coeffs[2]

    def shifted(self, shift: float, offset: float = 0.0) -> "SaddleSolution":
        """Saddle of s -> alpha(s + shift) + offset."""
        return SaddleSolution(self.s_star - shift, self.alpha_at + offset, self.a_coeffs)


@dataclass(frozen=True)
class DescentSample:
    u: float
    s: complex
    c_val: complex


@dataclass(frozen=True)
class ProbabilityBracket:
    log_p1: float
    log_p2: float
    certified: bool
    residue_active: bool = False
    # pole-split expansion near the pole; carries no certificate
    uniform: bool = False

    @property
    def order2_valid(self) -> bool:
        return math.isfinite(self.log_p2)

    def log_value(self, order: int) -> float:
        if order == 1 or not self.order2_valid:
            return self.log_p1
        return self.log_p2

    def contains(self, log_p: float, slack: float = 0.0) -> bool:
        lo, hi = sorted((self.log_p1, self.log_p2))
        return lo - slack <= log_p <= hi + slack
