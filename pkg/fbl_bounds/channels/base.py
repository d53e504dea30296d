from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import optimize

from ..config import DEFAULT_MC_SAMPLES
from ..errors import InfeasibleQuery, NoSaddle, NumericalFailure, Unsupported
from ..laplace import (
    LOWER_TAIL,
    UPPER_TAIL,
    ExponentKernel,
    ProbabilityBracket,
    SaddleSolution,
    bracket_from_saddle,
    certificate_grid,
    certify_bracket,
    find_saddle,
    integrate_descent,
    trace_descent_path,
)
from ..query import BoundQuery, BoundResult, Direction, Method
from ..specfun import LN2, LOG2E, gauss_q_inv

logger = logging.getLogger(__name__)

_ROOT_XTOL = 1e-14
# brentq rejects rtol below 4 eps
_ROOT_RTOL = 4.0 * float(np.finfo(float).eps)
_MAX_EXPANSIONS = 60


def normal_approx(n: int, pe: float, capacity_C: float, dispersion_V: float) -> float:
    """C - sqrt(V/n) log2(e) Q^-1(pe) + log2(n)/(2n), in bits per channel use."""
    return (
        capacity_C
        - math.sqrt(dispersion_V / n) * LOG2E * gauss_q_inv(pe)
        + math.log2(n) / (2.0 * n)
    )


@dataclass(frozen=True)
class FaMdResult:
    log_fa: float
    log_md: float
    method: str
    fa_bracket: Optional[ProbabilityBracket] = None
    md_bracket: Optional[ProbabilityBracket] = None
    # standard errors of the Monte-Carlo probability estimates
    stderr_fa: Optional[float] = None
    stderr_md: Optional[float] = None
    s_alpha: Optional[float] = None
    s_beta: Optional[float] = None


def solve_monotone(
    func: Callable[[float], float],
    start: float,
    step: float,
    lower_limit: float = -math.inf,
    upper_limit: float = math.inf,
) -> Tuple[float, int]:
    """Root of a monotone function, bracketing outwards from ``start``.

    Returns the root and the number of function evaluations.
    """
    calls = 0

    def counted(x: float) -> float:
        nonlocal calls
        calls += 1
        return func(x)

    f_start = counted(start)
    if f_start == 0.0:
        return start, calls
    # move towards the sign change: try both directions, keep the one that flips
    for direction in (+1.0, -1.0):
        width = step
        prev_x, prev_f = start, f_start
        for _ in range(_MAX_EXPANSIONS):
            x = start + direction * width
            if direction > 0 and x >= upper_limit:
                x = 0.5 * (prev_x + upper_limit) if math.isfinite(upper_limit) else x
            if direction < 0 and x <= lower_limit:
                x = 0.5 * (prev_x + lower_limit) if math.isfinite(lower_limit) else x
            f_x = counted(x)
            if math.isnan(f_x):
                break
            if (f_x > 0.0) != (prev_f > 0.0) or f_x == 0.0:
                lo, hi = sorted((prev_x, x))
                root = optimize.brentq(
                    counted, lo, hi, xtol=_ROOT_XTOL, rtol=_ROOT_RTOL, maxiter=200
                )
                return float(root), calls
            if abs(f_x) > abs(prev_f) and (f_x > 0.0) == (f_start > 0.0) and width > step:
                # moving away from the root
                break
            prev_x, prev_f = x, f_x
            width *= 2.0
    raise NumericalFailure(f"no sign change found around {start:g}")


class Channel(ABC):
    name: str = "channel"

    @abstractmethod
    def capacity(self) -> float:
        """Capacity in bits per channel use."""
        raise NotImplementedError

    @abstractmethod
    def dispersion(self) -> float:
        """Channel dispersion in nats^2."""
        raise NotImplementedError

    def normal_approx(self, n: int, pe: float) -> float:
        return normal_approx(n, pe, self.capacity(), self.dispersion())

    @abstractmethod
    def converse(self, query: BoundQuery) -> BoundResult:
        raise NotImplementedError

    def achievability(self, query: BoundQuery) -> BoundResult:
        raise Unsupported(f"{query.kind.value} is not available for {self.name}")


class LaplaceChannel(Channel):
    """Channel whose FA/MD probabilities are threshold tests on a sum statistic.

    FA is the lower tail P{X/n <= lambda} under the auxiliary law and MD the
    upper tail P{Y/n > lambda} under the channel law; both kernels carry their
    pole at s = 0.
    """

    # smallest admissible threshold
    lambda_floor: float = 0.0

    @abstractmethod
    def kernels(self, lam: float) -> Tuple[ExponentKernel, ExponentKernel]:
        raise NotImplementedError

    @abstractmethod
    def lambda_centres(self) -> Tuple[float, float]:
        """(threshold with P_MD = 1/2 limit, threshold with P_FA = 1/2 limit)."""
        raise NotImplementedError

    @abstractmethod
    def sample_statistics(
        self, n: int, samples: int, rng: np.random.Generator
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Draws of X/n (auxiliary law) and Y/n (channel law)."""
        raise NotImplementedError

    def saddles(self, lam: float) -> Tuple[SaddleSolution, SaddleSolution]:
        fa_kernel, md_kernel = self.kernels(lam)
        return find_saddle(fa_kernel), find_saddle(md_kernel)

    def certificate_available(self) -> bool:
        return True

    def has_exact(self) -> bool:
        return False

    def exact_log_fa(self, n: int, lam: float) -> float:
        raise Unsupported(f"exact evaluation is not available for {self.name}")

    def exact_log_md(self, n: int, lam: float) -> float:
        raise Unsupported(f"exact evaluation is not available for {self.name}")

    # ----------------------------------------------------------------- FA / MD

    def fa_md(
        self,
        n: int,
        lam: float,
        method: Method | str = Method.ASYM2,
        *,
        certify: bool = False,
        samples: int = 1_000_000,
        seed: int = 0,
    ) -> FaMdResult:
        method = Method.parse(method)
        if method is Method.MONTE_CARLO:
            rng = np.random.default_rng(seed)
            fa_stats, md_stats = self.sample_statistics(n, samples, rng)
            fa = float(np.mean(fa_stats <= lam))
            md = float(np.mean(md_stats > lam))
            return FaMdResult(
                log_fa=math.log(fa) if fa > 0 else -math.inf,
                log_md=math.log(md) if md > 0 else -math.inf,
                method=method.value,
                stderr_fa=math.sqrt(fa * (1.0 - fa) / samples),
                stderr_md=math.sqrt(md * (1.0 - md) / samples),
            )
        if method is Method.EXACT:
            return FaMdResult(self.exact_log_fa(n, lam), self.exact_log_md(n, lam), method.value)

        fa_kernel, md_kernel = self.kernels(lam)
        sa, sb = self.saddles(lam)
        if method is Method.INTEGRAL:
            fa = integrate_descent(fa_kernel, sa, n, 0.0, LOWER_TAIL)
            md = integrate_descent(md_kernel, sb, n, 0.0, UPPER_TAIL)
            return FaMdResult(fa.log_p, md.log_p, method.value, s_alpha=sa.s_star, s_beta=sb.s_star)

        fa_bracket = bracket_from_saddle(sa, n, 0.0, LOWER_TAIL)
        md_bracket = bracket_from_saddle(sb, n, 0.0, UPPER_TAIL)
        self._warn_order2(lam, fa=fa_bracket, md=md_bracket)
        if certify and self.certificate_available():
            fa_bracket = self._certified(fa_kernel, sa, n, fa_bracket)
            md_bracket = self._certified(md_kernel, sb, n, md_bracket)
        order = method.order
        return FaMdResult(
            fa_bracket.log_value(order),
            md_bracket.log_value(order),
            method.value,
            fa_bracket=fa_bracket,
            md_bracket=md_bracket,
            s_alpha=sa.s_star,
            s_beta=sb.s_star,
        )

    def _certified(
        self, kernel: ExponentKernel, saddle: SaddleSolution, n: int, bracket: ProbabilityBracket
    ) -> ProbabilityBracket:
        if bracket.residue_active or bracket.uniform or not bracket.order2_valid:
            return bracket
        samples = trace_descent_path(kernel, saddle, certificate_grid(n))
        ok = certify_bracket(kernel, saddle, 0.0, samples)
        return replace(bracket, certified=ok)

    @staticmethod
    def _warn_order2(lam: float, **brackets: ProbabilityBracket) -> None:
        for name, bracket in brackets.items():
            if not bracket.order2_valid:
                logger.warning(
                    "[%s] order-2 correction invalid at lambda=%s, order 1 reported", name, lam
                )

    def log_fa(self, n: int, lam: float, method: Method) -> float:
        if method is Method.EXACT:
            return self.exact_log_fa(n, lam)
        fa_kernel, _ = self.kernels(lam)
        saddle = find_saddle(fa_kernel)
        if method is Method.INTEGRAL:
            return integrate_descent(fa_kernel, saddle, n, 0.0, LOWER_TAIL).log_p
        return bracket_from_saddle(saddle, n, 0.0, LOWER_TAIL).log_value(method.order)

    def log_md(self, n: int, lam: float, method: Method) -> float:
        if method is Method.EXACT:
            return self.exact_log_md(n, lam)
        _, md_kernel = self.kernels(lam)
        saddle = find_saddle(md_kernel)
        if method is Method.INTEGRAL:
            return integrate_descent(md_kernel, saddle, n, 0.0, UPPER_TAIL).log_p
        return bracket_from_saddle(saddle, n, 0.0, UPPER_TAIL).log_value(method.order)

    # ------------------------------------------------------------- threshold

    def _threshold_step(self) -> float:
        md_c, fa_c = self.lambda_centres()
        return max(1e-3, 0.05 * abs(fa_c - md_c))

    def _safe(self, func: Callable[[float], float], fallback: float) -> Callable[[float], float]:
        def wrapped(lam: float) -> float:
            try:
                return func(lam)
            except NoSaddle:
                return fallback
        return wrapped

    def solve_md_threshold(self, n: int, log_target: float, method: Method) -> Tuple[float, int]:
        """lambda with ln P_MD(lambda) = log_target (P_MD decreasing in lambda)."""
        md_c, _ = self.lambda_centres()
        start = md_c + 1e-6 * max(1.0, abs(md_c))
        func = self._safe(lambda lam: self.log_md(n, lam, method) - log_target, math.inf)
        return solve_monotone(func, start, self._threshold_step(), lower_limit=self.lambda_floor)

    def solve_fa_threshold(self, n: int, log_target: float, method: Method) -> Tuple[float, int]:
        """lambda with ln P_FA(lambda) = log_target (P_FA increasing in lambda)."""
        _, fa_c = self.lambda_centres()
        start = fa_c - 1e-6 * max(1.0, abs(fa_c))
        func = self._safe(lambda lam: self.log_fa(n, lam, method) - log_target, -math.inf)
        return solve_monotone(func, start, self._threshold_step(), lower_limit=self.lambda_floor)

    # ---------------------------------------------------------- meta-converse

    def converse(self, query: BoundQuery) -> BoundResult:
        query.require_small_error()
        method = query.method
        if method is Method.MONTE_CARLO:
            return self._converse_monte_carlo(query)
        if method is Method.EXACT and not self.has_exact():
            raise Unsupported(f"exact evaluation is not available for {self.name}")
        if method in (Method.INTEGRAL, Method.EXACT):
            lam, log_value, calls = self._converse_point(query, method)
            value = self._to_value(query, log_value)
            return self._result(query, value, log_value, lam, calls)

        by_order = {}
        for order_method in (Method.ASYM1, Method.ASYM2):
            by_order[order_method] = self._converse_point(query, order_method)
        lam, log_value, calls = by_order[method]
        value = self._to_value(query, log_value)
        values = sorted(self._to_value(query, v[1]) for v in by_order.values())
        certified = self._certify_at(query.n, lam)
        return self._result(
            query,
            value,
            log_value,
            lam,
            calls,
            bracket=(values[0], values[1]),
            certified=certified,
        )

    def _converse_point(self, query: BoundQuery, method: Method) -> Tuple[float, float, int]:
        n = query.n
        if query.direction is Direction.RATE_GIVEN_PE:
            lam, calls = self.solve_md_threshold(n, math.log(query.pe), method)
            return lam, self.log_fa(n, lam, method), calls
        lam, calls = self.solve_fa_threshold(n, -n * query.rate * LN2, method)
        return lam, self.log_md(n, lam, method), calls

    @staticmethod
    def _to_value(query: BoundQuery, log_value: float) -> float:
        if query.direction is Direction.RATE_GIVEN_PE:
            return -log_value * LOG2E / query.n
        return math.exp(log_value)

    def _certify_at(self, n: int, lam: float) -> Optional[bool]:
        if not self.certificate_available():
            return False
        fa_kernel, md_kernel = self.kernels(lam)
        sa, sb = self.saddles(lam)
        fa = self._certified(fa_kernel, sa, n, bracket_from_saddle(sa, n, 0.0, LOWER_TAIL))
        md = self._certified(md_kernel, sb, n, bracket_from_saddle(sb, n, 0.0, UPPER_TAIL))
        self._warn_order2(lam, fa=fa, md=md)
        return bool(fa.certified and md.certified)

    def _result(
        self,
        query: BoundQuery,
        value: float,
        log_value: float,
        lam: float,
        calls: int,
        bracket: Optional[Tuple[float, float]] = None,
        certified: Optional[bool] = None,
        extra: Optional[dict] = None,
    ) -> BoundResult:
        diagnostics = {"lambda": lam, "iterations": calls}
        try:
            sa, sb = self.saddles(lam)
            diagnostics.update(
                s_alpha=sa.s_star,
                s_beta=sb.s_star,
                a2=sa.a2,
                a3=sa.a3,
                a4=sa.a4,
            )
        except NoSaddle:
            pass
        diagnostics.update(extra or {})
        log_pe = log_value if query.direction is Direction.PE_GIVEN_RATE else None
        return BoundResult(
            query=query,
            value=value,
            method=query.method.value,
            bracket=bracket,
            certified=certified,
            log_pe=log_pe,
            diagnostics=diagnostics,
        )

    def _converse_monte_carlo(self, query: BoundQuery) -> BoundResult:
        samples = query.samples or DEFAULT_MC_SAMPLES
        rng = np.random.default_rng(query.seed)
        fa_stats, md_stats = self.sample_statistics(query.n, samples, rng)
        n = query.n
        if query.direction is Direction.RATE_GIVEN_PE:
            lam = float(np.quantile(md_stats, 1.0 - query.pe))
            fa = float(np.mean(fa_stats <= lam))
            if fa <= 0.0:
                raise NumericalFailure("no false-alarm events; increase samples")
            value = -math.log2(fa) / n
            log_value = math.log(fa)
            stderr = math.sqrt(fa * (1.0 - fa) / samples)
        else:
            target = 2.0 ** (-n * query.rate)
            if target * samples < 10.0:
                raise NumericalFailure("target false-alarm level below Monte-Carlo resolution")
            lam = float(np.quantile(fa_stats, target))
            md = float(np.mean(md_stats > lam))
            value = md
            log_value = math.log(md) if md > 0 else -math.inf
            stderr = math.sqrt(md * (1.0 - md) / samples)
        return self._result(
            query, value, log_value, lam, samples, extra={"stderr": stderr, "seed": query.seed}
        )

    # ------------------------------------------------------------ kappa-beta

    def kappa_beta(
        self,
        query: BoundQuery,
        alpha_split: Optional[float] = None,
        alpha_search: Tuple[float, float] = (1e-4, 1.0 - 1e-4),
    ) -> BoundResult:
        """kappa-beta achievability with kappa(tau) = tau."""
        method = query.method
        if method is Method.MONTE_CARLO or (method is Method.EXACT and not self.has_exact()):
            raise Unsupported(f"kappa-beta is not available with {method.value} evaluation")
        n = query.n
        if query.direction is Direction.RATE_GIVEN_PE:
            log_pe = math.log(query.pe)

            def objective(alpha: float) -> Tuple[float, float]:
                lam, _ = self.solve_md_threshold(n, math.log(alpha) + log_pe, method)
                rate = (
                    (math.log1p(-alpha) + log_pe - self.log_fa(n, lam, method)) * LOG2E / n
                )
                return rate, lam

            sense = -1.0
        else:
            log_rate = n * query.rate * LN2

            def objective(alpha: float) -> Tuple[float, float]:
                def constraint(lam: float) -> float:
                    return (
                        math.log1p(-alpha)
                        + self.log_md(n, lam, method)
                        - math.log(alpha)
                        - self.log_fa(n, lam, method)
                        - log_rate
                    )

                md_c, _ = self.lambda_centres()
                lam, _ = solve_monotone(
                    self._safe(constraint, math.nan),
                    md_c + 1e-6 * max(1.0, abs(md_c)),
                    self._threshold_step(),
                    lower_limit=self.lambda_floor,
                )
                return math.exp(self.log_md(n, lam, method) - math.log(alpha)), lam

            sense = 1.0

        if alpha_split is not None:
            best_alpha = alpha_split
            calls = 1
        else:
            result = optimize.minimize_scalar(
                lambda a: sense * objective(a)[0],
                bounds=alpha_search,
                method="bounded",
                options={"xatol": 1e-6},
            )
            best_alpha = float(result.x)
            calls = int(result.nfev)
        value, lam = objective(best_alpha)
        if query.direction is Direction.PE_GIVEN_RATE and value >= 1.0:
            raise InfeasibleQuery(f"kappa-beta bound is vacuous at rate {query.rate}")
        log_value = math.log(value) if query.direction is Direction.PE_GIVEN_RATE else None
        return self._result(
            query,
            value,
            log_value if log_value is not None else math.nan,
            lam,
            calls,
            certified=False,
            extra={"alpha_split": best_alpha},
        )
