"""Binary symmetric channel: exact binomial tables, the periodic descent
integral, lattice asymptotics and the discrete meta-converse / RCU bounds.

Throughout, d is the Hamming-distance threshold and lambda = d / n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate, optimize, special

from ..errors import (
    DomainError,
    InfeasibleQuery,
    PoleAtSaddle,
    QuadratureFailure,
    RegimeViolation,
)
from ..laplace import (
    ExponentKernel,
    ProbabilityBracket,
    ShiftedKernel,
    power_coefficients,
    series_reversion,
)
from ..query import BoundQuery, BoundResult, Direction, Method
from ..specfun import LN2, LOG2E, bernoulli_table, binary_entropy, gauss_q, log_binom_pmf
from ..specs import BscSpec
from .base import Channel

logger = logging.getLogger(__name__)

# e^{-41.5} ~ 1e-18: the phi integrand is negligible once n d(phi) exceeds this
_PHI_TAIL_EXPONENT = 41.5
_PHI_SERIES = 1e-3


def bsc_from_snr(snr: float) -> BscSpec:
    """Hard-decision BSC of a BPSK/AWGN link: p = Q(sqrt(snr))."""
    if not snr > 0.0:
        raise DomainError(f"SNR must be positive, got {snr!r}")
    return BscSpec(p_bit=float(gauss_q(math.sqrt(snr))))


def bsc_capacity(spec: BscSpec) -> float:
    return 1.0 - float(binary_entropy(spec.p_bit))


def bsc_dispersion(spec: BscSpec) -> float:
    p = spec.p_bit
    return p * (1.0 - p) * spec.delta0**2


# ---------------------------------------------------------------- exact


@dataclass(frozen=True)
class BscTables:
    """Log-domain tables indexed by d = 0..n."""

    log_fa: np.ndarray
    log_md: np.ndarray
    log_q_half: np.ndarray
    log_q_bit: np.ndarray


def _log_tails(log_pmf: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(ln P{X <= d}, ln P{X > d}); the larger of the pair is the complement of the smaller."""
    lower = np.logaddexp.accumulate(log_pmf)
    upper = np.append(np.logaddexp.accumulate(log_pmf[::-1])[::-1][1:], -np.inf)
    with np.errstate(divide="ignore"):
        lower = np.where(lower <= upper, lower, np.log1p(-np.exp(upper)))
        upper = np.where(upper < lower, upper, np.log1p(-np.exp(lower)))
    return np.minimum(lower, 0.0), np.minimum(upper, 0.0)


def bsc_exact_tables(n: int, spec: BscSpec) -> BscTables:
    d = np.arange(n + 1)
    log_q_half = log_binom_pmf(n, d, 0.5)
    log_q_bit = log_binom_pmf(n, d, spec.p_bit)
    log_fa, _ = _log_tails(log_q_half)
    _, log_md = _log_tails(log_q_bit)
    return BscTables(log_fa, log_md, log_q_half, log_q_bit)


def _check_d(n: int, d: int) -> None:
    if n < 1 or not 0 <= d <= n:
        raise DomainError(f"threshold d={d} outside [0, {n}]")


def bsc_exact_fa_md(n: int, d: int, spec: BscSpec) -> Tuple[float, float]:
    """(ln P{Bin(n, 1/2) <= d}, ln P{Bin(n, p) > d})."""
    _check_d(n, d)
    tables = bsc_exact_tables(n, spec)
    return float(tables.log_fa[d]), float(tables.log_md[d])


# ---------------------------------------------------------------- kernels


class BscAlphaKernel(ExponentKernel):
    """alpha(s) = 2 lambda s + 2 ln(1 + e^{-s}) - 2 ln 2."""

    def __init__(self, lam: float) -> None:
        self.lam = float(lam)

    @property
    def strip(self) -> Tuple[float, float]:
        return -math.inf, math.inf

    def value(self, s):
        s = np.asarray(s)
        if np.iscomplexobj(s):
            soft = np.log1p(np.exp(-s))
        else:
            soft = np.logaddexp(0.0, -s)
        out = 2.0 * self.lam * s + 2.0 * soft - 2.0 * LN2
        return out[()] if np.ndim(out) == 0 else out

    def deriv(self, s, order: int):
        s = np.asarray(s)
        sig = 1.0 / (1.0 + np.exp(s))
        core = sig * (1.0 - sig)
        if order == 1:
            out = 2.0 * self.lam - 2.0 * sig
        elif order == 2:
            out = 2.0 * core
        elif order == 3:
            out = -2.0 * core * (1.0 - 2.0 * sig)
        elif order == 4:
            out = 2.0 * core * (1.0 - 6.0 * sig + 6.0 * sig * sig)
        else:
            raise ValueError("order must be in 1..4")
        return out[()] if np.ndim(out) == 0 else out


def bsc_kernel(lam: float, spec: BscSpec) -> Tuple[ExponentKernel, ExponentKernel]:
    """(alpha, beta) with beta(s) = alpha(s + delta0) - 2 lambda delta0 + 2 ln(2 (1 - p))."""
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam!r}")
    alpha = BscAlphaKernel(lam)
    offset = -2.0 * lam * spec.delta0 + 2.0 * math.log(2.0 * (1.0 - spec.p_bit))
    return alpha, ShiftedKernel(alpha, spec.delta0, offset)


def bsc_saddles(lam: float, spec: BscSpec) -> Tuple[float, float]:
    s_alpha = math.log((1.0 - lam) / lam)
    return s_alpha, s_alpha - spec.delta0


def _alpha_star(lam: float) -> float:
    return 2.0 * float(special.entr(lam) + special.entr(1.0 - lam)) - 2.0 * LN2


def _beta_star(lam: float, spec: BscSpec) -> float:
    p = spec.p_bit
    return 2.0 * float(special.entr(lam) + special.entr(1.0 - lam)) + 2.0 * (
        lam * math.log(p) + (1.0 - lam) * math.log1p(-p)
    )


# ---------------------------------------------------------------- periodic integral


def _log_sinc(x):
    return np.log(np.sinc(np.asarray(x) / math.pi))


def bsc_descent_distance(lam: float, phi):
    """d(phi) with alpha(p(phi)) = alpha(s_alpha) - 2 d(phi); even, d(0) = 0."""
    phi = np.asarray(phi, dtype=float)
    out = lam * _log_sinc(lam * phi) + (1.0 - lam) * _log_sinc((1.0 - lam) * phi) - _log_sinc(phi)
    return out[()] if np.ndim(out) == 0 else out


def _path_slope(lam: float, phi: float) -> float:
    """Real part of p'(phi) for p(phi) = ln v(phi) + i phi."""
    if abs(phi) < _PHI_SERIES:
        return -(1.0 - 2.0 * lam) * phi / 3.0 - ((1.0 - lam) ** 4 - lam**4) * phi**3 / 45.0
    return (1.0 - lam) / math.tan((1.0 - lam) * phi) - lam / math.tan(lam * phi)


def _phi_integrand(lam: float, n: int, pole: float, phi: float) -> float:
    log_v = math.log(math.sin((1.0 - lam) * phi) / math.sin(lam * phi)) if phi > 0.0 else math.log(
        (1.0 - lam) / lam
    )
    slope = complex(_path_slope(lam, phi), 1.0)
    denom = 1.0 - math.exp(pole - log_v) * complex(math.cos(phi), -math.sin(phi))
    return math.exp(-n * float(bsc_descent_distance(lam, phi))) * (slope / denom).imag


def _phi_upper(lam: float, n: int) -> float:
    target = _PHI_TAIL_EXPONENT / n
    top = math.pi * (1.0 - 1e-12)
    if float(bsc_descent_distance(lam, top)) <= target:
        return top
    return float(optimize.brentq(lambda x: float(bsc_descent_distance(lam, x)) - target, 0.0, top))


def _phi_integral(lam: float, n: int, pole: float) -> float:
    upper = _phi_upper(lam, n)
    value, err = integrate.quad(
        lambda x: _phi_integrand(lam, n, pole, x),
        0.0,
        upper,
        limit=400,
        epsabs=0.0,
        epsrel=1e-13,
    )
    if not math.isfinite(value):
        raise QuadratureFailure(f"phi integral diverged at lambda={lam:g}")
    return value / math.pi


def _combine(log_scale: float, integral: float, residue: bool, sign: float) -> float:
    signed = sign * integral
    if residue:
        if signed >= 0.0:
            raise QuadratureFailure("residue branch with inconsistent integral sign")
        return math.log1p(-math.exp(log_scale + math.log(-signed)))
    if signed <= 0.0:
        raise QuadratureFailure("negative probability from the phi integral")
    return log_scale + math.log(signed)


def bsc_integral_fa_md(n: int, d: int, spec: BscSpec) -> Tuple[float, float]:
    """FA/MD log-probabilities from the integral along the periodic descent path."""
    _check_d(n, d)
    if d in (0, n):
        return bsc_exact_fa_md(n, d, spec)
    lam = d / n
    s_alpha, s_beta = bsc_saddles(lam, spec)
    if s_alpha == 0.0 or s_beta == 0.0:
        raise PoleAtSaddle(f"lambda={lam:g} puts a pole on the saddle")
    log_fa = _combine(0.5 * n * _alpha_star(lam), _phi_integral(lam, n, 0.0), s_alpha < 0.0, 1.0)
    log_md = _combine(
        0.5 * n * _beta_star(lam, spec), _phi_integral(lam, n, spec.delta0), s_beta > 0.0, -1.0
    )
    return log_fa, log_md


# ---------------------------------------------------------------- lattice asymptotics


def _distance_coeffs(lam: float, kmax: int) -> np.ndarray:
    """d_{2k}, k = 0..kmax, Taylor coefficients of d(phi) in phi^2."""
    table = bernoulli_table(max(kmax, 2))
    out = np.zeros(kmax + 1)
    for k in range(1, kmax + 1):
        out[k] = (
            (-1) ** (k + 1)
            * 2.0 ** (2 * k - 1)
            * table.b2k(k)
            / (math.factorial(2 * k) * k)
            * (1.0 - lam ** (2 * k + 1) - (1.0 - lam) ** (2 * k + 1))
        )
    return out


def _sqrt_distance_coeffs(dist: np.ndarray, top: int) -> np.ndarray:
    """f(phi) = sign(phi) sqrt(2 d(phi)), indexed by power up to ``top``."""
    e = dist[2:] / dist[1]
    half = top // 2
    b = np.zeros(half + 1)
    b[0] = 1.0
    for k in range(1, half + 1):
        b[k] = sum((1.5 * j - k) * e[j - 1] * b[k - j] for j in range(1, k + 1)) / k
    f = np.zeros(top + 1)
    f1 = math.sqrt(2.0 * dist[1])
    for k in range(half + 1):
        if 2 * k + 1 <= top:
            f[2 * k + 1] = f1 * b[k]
    return f


def _pole_factor_coeffs(lam: float, q: float, top: int) -> np.ndarray:
    """Coefficients of phi g(phi), g = 1 / (-alpha'(p)) / (1 - e^{q - p})."""
    growth = 1.0 + math.exp(q)

    def xi(k: int) -> complex:
        return (2j) ** k / math.factorial(k) * ((lam + 1.0) ** k - lam**k - 2.0**k + 1.0)

    def nu(k: int) -> complex:
        return (2j) ** k / math.factorial(k) * (
            (2.0**k - 2.0) * (lam + growth * lam**k)
            - (1.0 + growth * lam) * ((lam + 1.0) ** k - 1.0 - lam**k)
        )

    lead = nu(3)
    if lead == 0:
        raise PoleAtSaddle(f"lambda={lam:g} puts the pole on the saddle")
    g = np.zeros(top + 1, dtype=complex)
    for k in range(top + 1):
        acc = xi(k + 2) - sum(nu(m + 3) * g[k - m] for m in range(1, k + 1))
        g[k] = acc / lead
    # the rational form above is the reciprocal of -alpha'/2
    return 0.5 * g


def bsc_series_coeffs(
    lam: float, spec: BscSpec, branch: str = "fa", max_order: int = 4
) -> np.ndarray:
    """Taylor coefficients c_0..c_max_order of c(u) = p'(u) / (1 - e^{q - p(u)}).

    ``branch`` selects the pole: q = 0 for false alarm, q = delta0 for missed detection.
    """
    branch = branch.lower()
    if branch not in ("fa", "md"):
        raise ValueError(f"Unknown branch: {branch}")
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam!r}")
    q = 0.0 if branch == "fa" else spec.delta0
    top = max_order + 1
    dist = _distance_coeffs(lam, top // 2 + 1)
    f = _sqrt_distance_coeffs(dist, top)
    phi = series_reversion(f, 0.0)
    g = _pole_factor_coeffs(lam, q, max_order)

    # G(phi(u)) with G(phi) = phi g(phi)
    composed = np.zeros(max_order + 1, dtype=complex)
    composed[0] = g[0]
    for k in range(1, max_order + 1):
        composed += g[k] * power_coefficients(phi, k, max_order)
    # u / phi(u) as a series
    ratio = phi[1 : max_order + 2]
    recip = np.zeros(max_order + 1, dtype=complex)
    recip[0] = 1.0 / ratio[0]
    for m in range(1, max_order + 1):
        recip[m] = -sum(ratio[j] * recip[m - j] for j in range(1, m + 1)) / ratio[0]
    return 2.0 * np.convolve(recip, composed)[: max_order + 1]


def bsc_g0(lam: float, q: float) -> float:
    return math.sqrt((1.0 - lam) / lam) / (1.0 - lam * (math.exp(q) + 1.0))


def bsc_g2(lam: float, q: float) -> float:
    growth = 1.0 + math.exp(q)
    return (1.0 - lam + lam * lam) / (12.0 * lam * (1.0 - lam)) + lam * math.exp(q) * growth / (
        1.0 - lam * growth
    ) ** 2


def _asymptotic_pair(n: int, lam: float, log_lead: float, q: float) -> Tuple[float, float]:
    g0 = bsc_g0(lam, q)
    log_p1 = log_lead - 0.5 * math.log(2.0 * math.pi * n / (g0 * g0))
    factor = 1.0 - bsc_g2(lam, q) / n
    if factor <= 0.0:
        logger.debug("[bsc] order-2 factor %s <= 0 at n=%s lambda=%s", factor, n, lam)
        return log_p1, -math.inf
    return log_p1, log_p1 + math.log(factor)


def bsc_asymptotic_fa_md(
    n: int, d: int, spec: BscSpec
) -> Tuple[ProbabilityBracket, ProbabilityBracket]:
    """Order-1/order-2 FA and MD values; both bracket the exact value from above/below."""
    _check_d(n, d)
    lam = d / n
    if not spec.p_bit < lam < 0.5:
        raise RegimeViolation(
            f"lambda={lam:g} outside ({spec.p_bit:g}, 0.5) where the lattice asymptotics hold"
        )
    fa1, fa2 = _asymptotic_pair(n, lam, 0.5 * n * _alpha_star(lam), 0.0)
    md1, md2 = _asymptotic_pair(n, lam, 0.5 * n * _beta_star(lam, spec), spec.delta0)
    fa = ProbabilityBracket(fa1, fa2, certified=math.isfinite(fa2))
    md = ProbabilityBracket(md1, md2, certified=math.isfinite(md2))
    return fa, md


# ---------------------------------------------------------------- meta-converse


@dataclass(frozen=True)
class DiscreteConverseSolution:
    d: int
    # randomisation weight on the boundary type d
    zeta: float
    log_fa: float
    log_md: float


FaMdEvaluator = Callable[[int], Tuple[float, float]]


def _evaluator(n: int, spec: BscSpec, method: Method, tables: BscTables) -> FaMdEvaluator:
    if method is Method.EXACT:
        return lambda d: (float(tables.log_fa[d]), float(tables.log_md[d]))
    if method is Method.INTEGRAL:

        def integral(d: int) -> Tuple[float, float]:
            try:
                return bsc_integral_fa_md(n, d, spec)
            except PoleAtSaddle:
                logger.debug("[bsc] pole on the saddle at d=%s; exact value used", d)
                return float(tables.log_fa[d]), float(tables.log_md[d])

        return integral
    if method.is_asymptotic:
        order = method.order

        def asymptotic(d: int) -> Tuple[float, float]:
            fa, md = bsc_asymptotic_fa_md(n, d, spec)
            return fa.log_value(order), md.log_value(order)

        return asymptotic
    raise ValueError(f"method {method.value} has no BSC evaluator")


def _search_range(n: int, spec: BscSpec, method: Method) -> Tuple[int, int]:
    if method.is_asymptotic:
        lo = math.floor(spec.p_bit * n) + 1
        hi = math.ceil(n / 2) - 1
        if lo > hi:
            raise RegimeViolation(f"no integer d with p < d/n < 1/2 at n={n}")
        return lo, hi
    return 0, n


def _first_true(predicate: Callable[[int], bool], lo: int, hi: int) -> Optional[int]:
    """Smallest d in [lo, hi] with predicate true, for a monotone predicate."""
    if not predicate(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if predicate(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def _log_minus(log_a: float, log_b: float) -> float:
    """ln(e^a - e^b) for a >= b."""
    if log_b == -math.inf:
        return log_a
    return log_a + math.log1p(-math.exp(log_b - log_a))


def bsc_converse_solution(
    n: int,
    spec: BscSpec,
    method: Method | str,
    *,
    pe: Optional[float] = None,
    rate: Optional[float] = None,
) -> DiscreteConverseSolution:
    """Neyman-Pearson threshold d and randomisation matching the target exactly."""
    method = Method.parse(method)
    tables = bsc_exact_tables(n, spec)
    evaluate = _evaluator(n, spec, method, tables)
    lo, hi = _search_range(n, spec, method)
    if pe is not None:
        log_pe = math.log(pe)
        d = _first_true(lambda k: evaluate(k)[1] <= log_pe, lo, hi)
    else:
        log_target = -n * rate * LN2
        d = _first_true(lambda k: evaluate(k)[0] >= log_target, lo, hi)
    if d is None or (method.is_asymptotic and d == lo):
        raise RegimeViolation(f"threshold for n={n} falls outside the asymptotic regime")
    log_fa, log_md = evaluate(d)
    if pe is not None:
        zeta = 0.0
        if log_pe > log_md:
            zeta = math.exp(_log_minus(log_pe, log_md) - tables.log_q_bit[d])
    else:
        zeta = (
            math.exp(_log_minus(log_fa, log_target) - tables.log_q_half[d])
            if log_fa > log_target
            else 0.0
        )
    zeta = min(max(zeta, 0.0), 1.0)
    return DiscreteConverseSolution(d=d, zeta=zeta, log_fa=log_fa, log_md=log_md)


def _converse_value(
    n: int, spec: BscSpec, sol: DiscreteConverseSolution, direction: Direction
) -> float:
    tables = bsc_exact_tables(n, spec)
    if direction is Direction.RATE_GIVEN_PE:
        if sol.zeta > 0.0:
            log_fa = _log_minus(sol.log_fa, math.log(sol.zeta) + tables.log_q_half[sol.d])
        else:
            log_fa = sol.log_fa
        return -log_fa * LOG2E / n
    if sol.zeta > 0.0:
        return math.exp(np.logaddexp(sol.log_md, math.log(sol.zeta) + tables.log_q_bit[sol.d]))
    return math.exp(sol.log_md)


def bsc_converse(query: BoundQuery) -> BoundResult:
    query.require_small_error()
    spec: BscSpec = query.channel
    n, method = query.n, query.method
    if method is Method.MONTE_CARLO:
        raise ValueError("the BSC converse is evaluated exactly; Monte-Carlo is not offered")
    kwargs = {"pe": query.pe} if query.pe is not None else {"rate": query.rate}
    sol = bsc_converse_solution(n, spec, method, **kwargs)
    value = _converse_value(n, spec, sol, query.direction)
    bracket = None
    certified = None
    if method.is_asymptotic:
        values = []
        for order_method in (Method.ASYM1, Method.ASYM2):
            other = bsc_converse_solution(n, spec, order_method, **kwargs)
            values.append(_converse_value(n, spec, other, query.direction))
        bracket = (min(values), max(values))
        fa, md = bsc_asymptotic_fa_md(n, sol.d, spec)
        certified = fa.certified and md.certified
    diagnostics = {
        "d": sol.d,
        "lambda": sol.d / n,
        "zeta": sol.zeta,
        "log_fa": sol.log_fa,
        "log_md": sol.log_md,
    }
    log_pe = math.log(value) if query.direction is Direction.PE_GIVEN_RATE and value > 0 else None
    return BoundResult(
        query=query,
        value=value,
        method=method.value,
        bracket=bracket,
        certified=certified,
        log_pe=log_pe,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------- RCU


@dataclass(frozen=True)
class BscRcuSum:
    log_pe: float
    # first d at which 2^{nR} P_FA(d) reaches one
    d0: int
    # ln of the boundary-split form that counts d0 on the unclamped side
    log_split: float


def _check_rcu_rate(n: int, rate_R: float) -> None:
    if not rate_R >= 1.0 / n:
        raise InfeasibleQuery(f"rate {rate_R} is below 1/n = {1.0 / n}")


def bsc_rcu_exact(n: int, rate_R: float, spec: BscSpec) -> BscRcuSum:
    """sum_d min(1, 2^{nR} P_FA(d)) q_n(d; p) in the log domain."""
    _check_rcu_rate(n, rate_R)
    tables = bsc_exact_tables(n, spec)
    log_union = n * rate_R * LN2 + tables.log_fa
    log_pe = float(special.logsumexp(np.minimum(log_union, 0.0) + tables.log_q_bit))
    d0 = int(np.argmax(log_union >= 0.0)) if np.any(log_union >= 0.0) else n
    excess = math.expm1(min(float(log_union[d0]), 700.0)) * math.exp(tables.log_q_bit[d0])
    log_split = math.log(math.exp(log_pe) + excess) if excess > 0.0 else log_pe
    if excess > 0.0:
        logger.info(
            "[bsc-rcu] boundary split exceeds the clamped sum at d0=%s by %.3e", d0, excess
        )
    return BscRcuSum(log_pe=min(log_pe, 0.0), d0=d0, log_split=log_split)


def _rcu_w2(n: int, lam: float) -> float:
    return (1.0 - float(binary_entropy(lam))) * LN2 + math.log(
        2.0 * math.pi * n * lam * (1.0 - 2.0 * lam) ** 2 / (1.0 - lam)
    ) / (2.0 * n)


def bsc_rcu_lambda(n: int, rate_R: float, spec: BscSpec) -> float:
    """Threshold solving w2(lambda) = R ln 2 on (p, 1/2)."""
    _check_rcu_rate(n, rate_R)
    p = spec.p_bit
    lo, hi = p * (1.0 + 1e-9), 0.5 - 1e-9
    target = rate_R * LN2
    if _rcu_w2(n, lo) <= target:
        raise RegimeViolation(f"rate {rate_R} leaves no RCU threshold above p={p} at n={n}")
    return float(optimize.brentq(lambda x: _rcu_w2(n, x) - target, lo, hi, xtol=1e-14))


def bsc_rcu_asymptotic(n: int, rate_R: float, spec: BscSpec) -> float:
    p = spec.p_bit
    lam = bsc_rcu_lambda(n, rate_R, spec)
    w0 = (
        float(binary_entropy(lam)) * LN2
        + math.log1p(-p)
        - lam * spec.delta0
        - math.log(2.0 * math.pi * n) / (2.0 * n)
    )
    w1 = (lam - p) * (p * (1.0 - lam) ** 2 - (1.0 - p) * lam**2) / (
        p * (1.0 - p) * (1.0 - 2.0 * lam) * math.sqrt(lam * (1.0 - lam))
    )
    if w1 <= 0.0:
        raise RegimeViolation(f"RCU prefactor must be positive, got {w1:.3e} at lambda={lam:.6f}")
    logger.debug("[bsc-rcu] n=%s R=%s lambda=%s w1=%s", n, rate_R, lam, w1)
    return n * w0 - math.log(w1)


def bsc_rcu(n: int, rate_R: float, spec: BscSpec, method: Method | str = Method.EXACT) -> float:
    """ln of the RCU bound; asymptotic methods share the single expansion."""
    method = Method.parse(method)
    _check_rcu_rate(n, rate_R)
    if method is Method.EXACT:
        return bsc_rcu_exact(n, rate_R, spec).log_pe
    if method.is_asymptotic:
        return bsc_rcu_asymptotic(n, rate_R, spec)
    raise ValueError(f"BSC RCU supports exact or asymptotic evaluation, not {method.value}")


def bsc_rcu_rate(n: int, pe: float, spec: BscSpec, method: Method | str = Method.EXACT) -> float:
    """Largest rate whose RCU bound does not exceed pe."""
    if not 0.0 < pe < 1.0:
        raise DomainError(f"pe must lie in (0, 1), got {pe!r}")
    method = Method.parse(method)
    log_pe = math.log(pe)

    def excess(rate: float) -> float:
        return bsc_rcu(n, rate, spec, method) - log_pe

    if method is Method.EXACT:
        lo, hi = (1.0 + 1e-9) / n, 1.0
        if excess(lo) > 0.0:
            raise InfeasibleQuery(f"RCU bound exceeds pe={pe} at every rate above 1/n")
        return float(optimize.brentq(excess, lo, hi, xtol=1e-12))

    # the expansion breaks down at low rates (w1 <= 0), so walk down from capacity
    capacity = bsc_capacity(spec)
    prev = capacity
    for k in range(1, 40):
        rate = capacity * (1.0 - k / 40)
        if rate <= 1.0 / n:
            break
        try:
            value = excess(rate)
        except RegimeViolation:
            if prev == capacity:
                continue
            raise
        if value <= 0.0:
            if prev == capacity:
                return rate
            return float(optimize.brentq(excess, rate, prev, xtol=1e-12))
        prev = rate
    raise InfeasibleQuery(f"RCU bound exceeds pe={pe} at every rate above 1/n")


# ---------------------------------------------------------------- channel


class BscChannel(Channel):
    name = "bsc"

    def __init__(self, spec: BscSpec) -> None:
        self.spec = spec

    def capacity(self) -> float:
        return bsc_capacity(self.spec)

    def dispersion(self) -> float:
        return bsc_dispersion(self.spec)

    def converse(self, query: BoundQuery) -> BoundResult:
        return bsc_converse(query)

    def achievability(self, query: BoundQuery) -> BoundResult:
        n, method = query.n, query.method
        diagnostics = {}
        if query.direction is Direction.RATE_GIVEN_PE:
            value = bsc_rcu_rate(n, query.pe, self.spec, method)
            log_pe = math.log(query.pe)
        else:
            if method is Method.EXACT:
                rcu = bsc_rcu_exact(n, query.rate, self.spec)
                log_pe = rcu.log_pe
                diagnostics.update(d0=rcu.d0, log_split=rcu.log_split)
            else:
                log_pe = bsc_rcu(n, query.rate, self.spec, method)
                diagnostics["lambda"] = bsc_rcu_lambda(n, query.rate, self.spec)
            value = math.exp(log_pe)
        return BoundResult(
            query=query,
            value=value,
            method=method.value,
            log_pe=log_pe,
            diagnostics=diagnostics,
        )
