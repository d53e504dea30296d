"""RCU achievability for the real AWGN channel with codewords on the power sphere.

The transmitted codeword correlates with the output as rho = <x, y>/(|x||y|);
an independent codeword correlates as eta. The bound is
E[min(1, 2^{nR} P{eta > rho})].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import integrate, optimize, stats

from ..errors import DomainError, InfeasibleQuery, RegimeViolation, TailAssumptionViolated
from ..query import Method
from ..specfun import LN2, g_nu, g_nu_deriv
from ..specs import awgn_spec
from .awgn import awgn_capacity, awgn_dispersion

logger = logging.getLogger(__name__)

_EDGE = 1e-12
# integrand is dropped once its exponent is this far below the value at lambda
_TAIL_DROP = 45.0
_MC_CHUNK = 1 << 18


@dataclass(frozen=True)
class RcuContext:
    n: int
    rate_R: float
    snr_Omega: float
    alpha_const: float
    lambda_star: float


def _alpha(snr: float) -> float:
    return math.sqrt(snr / 4.0)


def _check_corr(a: float) -> None:
    if not -1.0 < a < 1.0:
        raise DomainError(f"correlation must lie in (-1, 1), got {a!r}")


def rcu_u_terms(a: float, snr: float) -> Tuple[float, float]:
    """Leading and 1/n terms of the exponent of the rho density."""
    _check_corr(a)
    alpha = _alpha(snr)
    b = alpha * a
    root = math.sqrt(1.0 + b * b)
    one_minus = 1.0 - a * a
    u0 = (
        0.5 * math.log(one_minus)
        - 2.0 * alpha * alpha
        + b * b
        + b * root
        + math.log(b + root)
    )
    u1 = math.log(1.0 + b * b + b * root) + 3.0 * math.log(one_minus) + math.log(2.0 * math.pi)
    return u0, u1


def rcu_u_n(a: float, n: int, snr: float) -> float:
    u0, u1 = rcu_u_terms(a, snr)
    return u0 + math.log(n) / (2.0 * n) - u1 / (2.0 * n)


def rcu_log_f_rho(a: float, ctx: RcuContext) -> float:
    """ln of the density of rho at a."""
    return ctx.n * rcu_u_n(a, ctx.n, ctx.snr_Omega)


def _s_gamma(a: float, nu: float, g_method: str) -> float:
    """Root of G'_nu(s) = -a on s < 0."""
    guess = -2.0 * a / (1.0 - a * a)
    lo = 2.0 * guess
    while g_nu_deriv(nu, lo, 1, g_method) + a > 0.0:
        lo *= 2.0
        if lo < -1e12:
            raise TailAssumptionViolated(f"no tail saddle for a={a!r}")
    return float(optimize.brentq(lambda s: g_nu_deriv(nu, s, 1, g_method) + a, lo, 0.0, xtol=1e-14))


def rcu_v_n(a: float, n: int, g_method: str = "auto") -> float:
    """-(1/n) ln P{eta > a} by the saddle point of the eta transform."""
    _check_corr(a)
    if not a > 0.0:
        raise TailAssumptionViolated(f"the eta tail needs a > 0, got {a!r}")
    nu = 0.5 * n
    s = _s_gamma(a, nu, g_method)
    if not s < 0.0:
        raise TailAssumptionViolated(f"saddle s={s!r} not in the left half-plane")
    g_val = g_nu(nu, s, g_method)
    curvature = g_nu_deriv(nu, s, 2, g_method)
    return -0.5 * (g_val + a * s) + math.log(math.pi * n * s * s * curvature) / (2.0 * n)


def rcu_log_g(a: float, n: int, g_method: str = "auto") -> float:
    return -n * rcu_v_n(a, n, g_method)


def _t_statistic(a: float, n: int) -> float:
    return a * math.sqrt(n - 1) / math.sqrt(1.0 - a * a)


def rcu_exact_log_g(a: float, n: int) -> float:
    """ln P{eta > a} from the Student-t law with n - 1 degrees of freedom."""
    _check_corr(a)
    return float(stats.t.logsf(_t_statistic(a, n), n - 1))


def rcu_rho_log_cdf(a: float, n: int, snr: float) -> float:
    """ln P{rho <= a}; the t-statistic of rho is non-central t(n - 1, sqrt(n snr))."""
    _check_corr(a)
    return float(stats.nct.logcdf(_t_statistic(a, n), n - 1, math.sqrt(n * snr)))


def rcu_lambda(rate_R: float, n: int, snr: float, g_method: str = "auto") -> float:
    """Correlation where 2^{nR} P{eta > lambda} = 1."""
    if not rate_R > 1.0 / n:
        raise InfeasibleQuery(f"rate={rate_R} not above 1/n={1.0 / n:g}")
    target = rate_R * LN2
    seed = math.sqrt(1.0 - 2.0 ** (-2.0 * rate_R) * math.exp(math.log(n) / n))

    def residual(lam: float) -> float:
        return rcu_v_n(lam, n, g_method) - target

    try:
        lam = float(optimize.newton(residual, seed, tol=1e-14, maxiter=50))
        if 0.0 < lam < 1.0 and abs(residual(lam)) < 1e-12:
            return lam
    except (RuntimeError, ArithmeticError, TailAssumptionViolated, DomainError):
        pass
    lo, hi = 1e-9, 1.0 - 1e-9
    if residual(lo) > 0.0 or residual(hi) < 0.0:
        raise InfeasibleQuery(f"no RCU threshold in (0, 1) for rate={rate_R}")
    logger.debug("[rcu] newton from %s failed; bisecting", seed)
    return float(optimize.brentq(residual, lo, hi, xtol=1e-15, rtol=4.5e-16))


def rcu_context(n: int, rate_R: float, snr: float, g_method: str = "auto") -> RcuContext:
    if not snr > 0.0:
        raise DomainError(f"SNR must be positive, got {snr!r}")
    return RcuContext(
        n=n,
        rate_R=rate_R,
        snr_Omega=snr,
        alpha_const=_alpha(snr),
        lambda_star=rcu_lambda(rate_R, n, snr, g_method),
    )


def rcu_w_terms(a: float, snr: float) -> Tuple[float, float]:
    alpha = _alpha(snr)
    w1 = alpha * a + math.sqrt(1.0 + (alpha * a) ** 2)
    slope = 2.0 * alpha * (1.0 - a * a) * w1
    w0 = (
        math.sqrt((1.0 - a * a) * (1.0 + alpha * a * w1) / (a * a))
        * (slope - a)
        * (2.0 * a - slope)
    )
    return w0, w1


def _rcu_asymptotic(ctx: RcuContext) -> float:
    lam = ctx.lambda_star
    w0, _ = rcu_w_terms(lam, ctx.snr_Omega)
    if not w0 > 0.0:
        raise RegimeViolation(f"RCU asymptotic needs w0 > 0, got {w0:g} at lambda={lam:g}")
    u0, _ = rcu_u_terms(lam, ctx.snr_Omega)
    n = ctx.n
    return n * u0 - 0.5 * math.log(2.0 * math.pi * n) - math.log(w0)


def _upper_limit(exponent, lam: float, peak: float) -> float:
    a = lam
    step = 0.01 * (1.0 - lam)
    while a + step < 1.0 - _EDGE:
        a += step
        if exponent(a) < peak - _TAIL_DROP:
            return a
        step *= 1.5
    return 1.0 - _EDGE


def _rcu_integral(ctx: RcuContext, g_method: str) -> float:
    n, lam, snr = ctx.n, ctx.lambda_star, ctx.snr_Omega
    rate_term = n * ctx.rate_R * LN2

    def below(a: float) -> float:
        return n * rcu_u_n(a, n, snr)

    def above(a: float) -> float:
        return n * rcu_u_n(a, n, snr) + rcu_log_g(a, n, g_method) + rate_term

    # u peaks at sqrt(snr / (1 + snr)) in the large-n limit
    peak = max(below(lam), below(min(lam, math.sqrt(snr / (1.0 + snr)))))
    head, _ = integrate.quad(
        lambda a: math.exp(below(a) - peak), -1.0 + _EDGE, lam, limit=200, epsabs=0.0, epsrel=1e-10
    )
    top = _upper_limit(above, lam, peak)
    tail, _ = integrate.quad(
        lambda a: math.exp(above(a) - peak), lam, top, limit=200, epsabs=0.0, epsrel=1e-10
    )
    return peak + math.log(head + tail)


def _rcu_exact(n: int, rate_R: float, snr: float) -> float:
    """E[min(1, 2^{nR} g(rho))] on the t-statistic scale."""
    dof, shift = n - 1, math.sqrt(n * snr)
    rate_term = n * rate_R * LN2
    if rate_term < 700.0:
        tau = float(stats.t.isf(math.exp(-rate_term), dof))
    else:
        tau = float(optimize.brentq(lambda x: stats.t.logsf(x, dof) + rate_term, 0.0, 1e8))
    log_head = float(stats.nct.logcdf(tau, dof, shift))

    def log_integrand(x: float) -> float:
        return rate_term + float(stats.t.logsf(x, dof)) + float(stats.nct.logpdf(x, dof, shift))

    peak = log_integrand(tau)
    mode = max(tau, shift)
    upper = mode + 60.0 * (1.0 + mode / math.sqrt(dof))
    tail, _ = integrate.quad(
        lambda x: math.exp(log_integrand(x) - peak), tau, upper, limit=400, epsabs=0.0, epsrel=1e-9,
        points=[mode] if mode > tau else None,
    )
    return float(np.logaddexp(log_head, peak + math.log(tail)))


def rcu_pe(
    n: int,
    rate_R: float,
    snr: float,
    method: Method | str = Method.ASYM2,
    g_method: str = "auto",
) -> float:
    """ln of the RCU error-probability bound."""
    method = Method.parse(method)
    if method is Method.EXACT:
        if not rate_R > 0.0:
            raise DomainError(f"rate must be positive, got {rate_R!r}")
        return _rcu_exact(n, rate_R, snr)
    if method is Method.MONTE_CARLO:
        pe, _ = rcu_monte_carlo(n, rate_R, snr)
        return math.log(pe) if pe > 0.0 else -math.inf
    ctx = rcu_context(n, rate_R, snr, g_method)
    if method is Method.INTEGRAL:
        return _rcu_integral(ctx, g_method)
    return _rcu_asymptotic(ctx)


def rcu_monte_carlo(
    n: int, rate_R: float, snr: float, samples: int = 1_000_000, seed: int = 0
) -> Tuple[float, float]:
    """Sample mean and standard error of min(1, 2^{nR} g(rho)) with exact g."""
    rng = np.random.default_rng(seed)
    shift = math.sqrt(n * snr)
    total = 0.0
    total_sq = 0.0
    for start in range(0, samples, _MC_CHUNK):
        size = min(_MC_CHUNK, samples - start)
        signal = shift + rng.standard_normal(size)
        rest = rng.chisquare(n - 1, size)
        t_stat = signal / np.sqrt(rest / (n - 1))
        log_terms = n * rate_R * LN2 + stats.t.logsf(t_stat, n - 1)
        terms = np.exp(np.minimum(log_terms, 0.0))
        total += float(terms.sum())
        total_sq += float(np.square(terms).sum())
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / samples)


def rcu_rate(
    n: int,
    pe: float,
    snr: float,
    method: Method | str = Method.ASYM2,
    g_method: str = "auto",
    grid: int = 40,
) -> float:
    """Largest rate whose RCU bound does not exceed pe."""
    if not 0.0 < pe < 1.0:
        raise DomainError(f"pe must lie in (0, 1), got {pe!r}")
    method = Method.parse(method)
    if method is Method.MONTE_CARLO:
        raise ValueError("rate inversion needs a deterministic method")
    capacity = awgn_capacity(awgn_spec(snr))
    log_pe = math.log(pe)

    def excess(rate: float) -> float:
        try:
            return rcu_pe(n, rate, snr, method, g_method) - log_pe
        except RegimeViolation:
            # only reached above lambda*, next to capacity
            return math.inf

    rates = [capacity * (1.0 - k / grid) for k in range(1, grid)]
    rates = [r for r in rates if r > 1.0 / n]
    prev = capacity
    prev_value = math.inf
    for rate in rates:
        value = excess(rate)
        if value <= 0.0:
            if not math.isfinite(prev_value):
                # walk in from the capacity side to a finite endpoint
                hi = prev
                while not math.isfinite(excess(hi)) and hi - rate > 1e-12:
                    hi = 0.5 * (hi + rate)
                if excess(hi) <= 0.0:
                    return hi
                prev = hi
            return float(optimize.brentq(excess, rate, prev, xtol=1e-12))
        prev, prev_value = rate, value
    raise InfeasibleQuery(f"RCU bound exceeds pe={pe} at every rate above 1/n")


def rcu_dispersion_check(snr: float) -> float:
    return awgn_dispersion(awgn_spec(snr))
