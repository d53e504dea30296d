from __future__ import annotations

import math

import numpy as np
import pytest

from fbl_bounds.channels.bsc import (
    BscChannel,
    BscTables,
    bsc_asymptotic_fa_md,
    bsc_capacity,
    bsc_converse,
    bsc_converse_solution,
    bsc_dispersion,
    bsc_exact_fa_md,
    bsc_exact_tables,
    bsc_from_snr,
    bsc_g0,
    bsc_g2,
    bsc_integral_fa_md,
    bsc_kernel,
    bsc_series_coeffs,
    bsc_rcu,
    bsc_rcu_exact,
    bsc_rcu_lambda,
    bsc_rcu_rate,
    bsc_saddles,
)
from fbl_bounds.errors import InfeasibleQuery, RegimeViolation
from fbl_bounds.laplace import find_saddle
from fbl_bounds.query import BoundKind, BoundQuery, Method
from fbl_bounds.specs import BscSpec
from fbl_bounds.selftest import CHECKS

SPEC = BscSpec(0.11)


def test_exact_tables_small_blocklength() -> None:
    log_fa, log_md = bsc_exact_fa_md(10, 4, SPEC)
    assert math.exp(log_fa) == pytest.approx(0.376953125, rel=1e-12)
    assert math.exp(log_md) == pytest.approx(0.002516971586, rel=1e-9)
    tables = bsc_exact_tables(10, SPEC)
    assert isinstance(tables, BscTables)
    assert tables.log_fa[10] == pytest.approx(0.0, abs=1e-15)
    assert tables.log_md[10] == -math.inf


@pytest.mark.parametrize("n,d", [(10, 4), (200, 10), (200, 30), (200, 60), (200, 80), (200, 120)])
def test_periodic_integral_matches_exact(n: int, d: int) -> None:
    exact = bsc_exact_fa_md(n, d, SPEC)
    integral = bsc_integral_fa_md(n, d, SPEC)
    assert integral[0] == pytest.approx(exact[0], abs=1e-7)
    assert integral[1] == pytest.approx(exact[1], abs=1e-7)


def test_integral_boundaries_fall_back_to_exact() -> None:
    assert bsc_integral_fa_md(50, 0, SPEC) == bsc_exact_fa_md(50, 0, SPEC)
    assert bsc_integral_fa_md(50, 50, SPEC) == bsc_exact_fa_md(50, 50, SPEC)


def test_kernel_saddle_is_log_odds() -> None:
    lam = 0.3
    alpha, beta = bsc_kernel(lam, SPEC)
    s_alpha, s_beta = bsc_saddles(lam, SPEC)
    assert s_alpha == pytest.approx(math.log(0.7 / 0.3), abs=1e-15)
    assert find_saddle(alpha).s_star == pytest.approx(s_alpha, abs=1e-10)
    assert find_saddle(beta).s_star == pytest.approx(s_beta, abs=1e-10)
    assert abs(alpha.value(0.0)) < 1e-15
    assert abs(beta.value(0.0)) < 1e-14


@pytest.mark.parametrize("p_bit", [0.05, 0.11])
@pytest.mark.parametrize("n", [100, 500, 2000])
def test_asymptotic_orders_bracket_exact(p_bit: float, n: int) -> None:
    spec = BscSpec(p_bit)
    tables = bsc_exact_tables(n, spec)
    lo = math.floor(p_bit * n) + 1
    hi = math.ceil(n / 2) - 1
    for d in range(lo, hi + 1):
        fa, md = bsc_asymptotic_fa_md(n, d, spec)
        for bracket, exact in ((fa, tables.log_fa[d]), (md, tables.log_md[d])):
            # an invalid order 2 is -inf and leaves the order-1 upper side to check
            assert bracket.log_p2 <= exact <= bracket.log_p1


def test_exact_tables_stay_accurate_near_one() -> None:
    tables = bsc_exact_tables(67, SPEC)
    assert np.all(tables.log_fa <= 0.0)
    assert np.all(tables.log_md <= 0.0)
    # P{Bin(67, 1/2) > 65} = 68 / 2^67
    assert tables.log_fa[65] == pytest.approx(-68.0 / 2.0**67, rel=1e-12)
    integral = bsc_integral_fa_md(67, 65, SPEC)
    assert integral[0] == pytest.approx(tables.log_fa[65], rel=1e-9)
    head = float(np.exp(tables.log_q_bit[:2]).sum())
    assert tables.log_md[1] == pytest.approx(math.log1p(-head), rel=1e-12)


def test_periodic_integral_matches_exact_on_random_pairs() -> None:
    rng = np.random.default_rng(7)
    pairs = []
    while len(pairs) < 50:
        n = int(rng.integers(10, 501))
        d = int(rng.integers(1, n))
        # d = n/2 and d = p n put a pole on a saddle
        if 2 * d != n and 100 * d != 11 * n:
            pairs.append((n, d))
    for n, d in pairs:
        exact = bsc_exact_fa_md(n, d, SPEC)
        integral = bsc_integral_fa_md(n, d, SPEC)
        for got, want in zip(integral, exact):
            assert abs(got - want) <= 1e-9 * abs(want), (n, d)


def test_asymptotics_outside_regime_rejected() -> None:
    with pytest.raises(RegimeViolation):
        bsc_asymptotic_fa_md(100, 5, SPEC)
    with pytest.raises(RegimeViolation):
        bsc_asymptotic_fa_md(100, 60, SPEC)


@pytest.mark.parametrize("lam", [0.2, 0.3, 0.4])
@pytest.mark.parametrize("branch", ["fa", "md"])
def test_series_coefficients_match_closed_forms(lam: float, branch: str) -> None:
    q = 0.0 if branch == "fa" else SPEC.delta0
    c = bsc_series_coeffs(lam, SPEC, branch)
    g0, g2 = bsc_g0(lam, q), bsc_g2(lam, q)
    assert c[0] == pytest.approx(1j * g0, rel=1e-10)
    assert (c[2] / c[0]).real == pytest.approx(-g2, rel=1e-9)


def test_selftest_series_check_meets_tolerance() -> None:
    passed, detail = CHECKS["bsc_series"]()
    assert passed, detail


def test_series_coefficients_reject_unknown_branch() -> None:
    with pytest.raises(ValueError):
        bsc_series_coeffs(0.3, SPEC, "both")


def test_capacity_dispersion_and_snr_mapping() -> None:
    assert bsc_capacity(SPEC) == pytest.approx(0.500084, abs=1e-6)
    assert bsc_dispersion(SPEC) == pytest.approx(0.4279, abs=1e-4)
    assert bsc_from_snr(4.0).p_bit == pytest.approx(0.02275, abs=1e-5)


def test_converse_rate_when_target_hits_table_entry() -> None:
    pe = math.exp(bsc_exact_fa_md(10, 4, SPEC)[1])
    result = bsc_converse(BoundQuery(channel=SPEC, n=10, pe=pe, method=Method.EXACT))
    assert result.value == pytest.approx(-math.log2(0.376953125) / 10, rel=1e-9)


def test_converse_randomisation_hits_target_exactly() -> None:
    n, pe = 100, 1e-3
    sol = bsc_converse_solution(n, SPEC, Method.EXACT, pe=pe)
    tables = bsc_exact_tables(n, SPEC)
    assert 0.0 <= sol.zeta <= 1.0
    achieved = math.exp(tables.log_md[sol.d]) + sol.zeta * math.exp(tables.log_q_bit[sol.d])
    assert achieved == pytest.approx(pe, rel=1e-10)
    assert tables.log_md[sol.d - 1] > math.log(pe)


def test_converse_directions_are_consistent() -> None:
    n = 200
    rate = bsc_converse(BoundQuery(channel=SPEC, n=n, pe=1e-3, method=Method.EXACT)).value
    pe = bsc_converse(BoundQuery(channel=SPEC, n=n, rate=rate, method=Method.EXACT))
    assert pe.value == pytest.approx(1e-3, rel=1e-6)


def test_asymptotic_converse_close_to_exact() -> None:
    exact = bsc_converse(BoundQuery(channel=SPEC, n=500, pe=1e-3, method=Method.EXACT))
    asym = bsc_converse(BoundQuery(channel=SPEC, n=500, pe=1e-3, method=Method.ASYM2))
    integral = bsc_converse(BoundQuery(channel=SPEC, n=500, pe=1e-3, method=Method.INTEGRAL))
    assert asym.value == pytest.approx(exact.value, abs=5e-3)
    assert integral.value == pytest.approx(exact.value, abs=1e-7)
    lower, upper = asym.bracket
    assert lower <= asym.value <= upper
    assert asym.diagnostics["d"] / 500 == asym.diagnostics["lambda"]


def test_converse_tracks_normal_approximation() -> None:
    channel = BscChannel(SPEC)
    for n in (1000, 10_000):
        bound = bsc_converse(BoundQuery(channel=SPEC, n=n, pe=1e-3, method=Method.EXACT)).value
        assert n * abs(bound - channel.normal_approx(n, 1e-3)) < 5.0


def test_converse_refuses_monte_carlo() -> None:
    query = BoundQuery(channel=SPEC, n=100, pe=1e-3, method=Method.MONTE_CARLO)
    with pytest.raises(ValueError):
        bsc_converse(query)


def test_rcu_two_symbol_sum() -> None:
    rcu = bsc_rcu_exact(2, 0.5, SPEC)
    assert math.exp(rcu.log_pe) == pytest.approx(0.60395, abs=1e-5)
    assert rcu.d0 == 1
    assert rcu.log_split > rcu.log_pe


def test_rcu_rejects_rate_below_one_over_n() -> None:
    with pytest.raises(InfeasibleQuery):
        bsc_rcu(100, 0.005, SPEC)


def test_rcu_asymptotic_converges_to_exact() -> None:
    spec = BscSpec(0.05)
    gaps = []
    for n in (200, 500, 1000):
        exact = bsc_rcu(n, 0.5, spec, Method.EXACT)
        asym = bsc_rcu(n, 0.5, spec, Method.ASYM2)
        gaps.append(abs(exact - asym) / n)
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[-1] < 1e-3


def test_rcu_threshold_inside_regime() -> None:
    spec = BscSpec(0.05)
    lam = bsc_rcu_lambda(500, 0.5, spec)
    assert spec.p_bit < lam < 0.5


def test_converse_below_rcu() -> None:
    spec = BscSpec(0.05)
    converse = bsc_converse(BoundQuery(channel=spec, n=200, rate=0.5, method=Method.EXACT))
    assert converse.value <= math.exp(bsc_rcu(200, 0.5, spec))


def test_rcu_rate_inversion() -> None:
    rate = bsc_rcu_rate(200, 1e-3, SPEC)
    assert 0.0 < rate < bsc_capacity(SPEC)
    assert bsc_rcu(200, rate, SPEC) == pytest.approx(math.log(1e-3), abs=1e-6)
    converse = bsc_converse(BoundQuery(channel=SPEC, n=200, pe=1e-3, method=Method.EXACT))
    assert rate <= converse.value


def test_channel_achievability_reports_split() -> None:
    query = BoundQuery(channel=SPEC, n=200, rate=0.3, kind=BoundKind.RCU, method=Method.EXACT)
    result = BscChannel(SPEC).achievability(query)
    assert result.value == pytest.approx(math.exp(result.log_pe))
    assert {"d0", "log_split"} <= set(result.diagnostics)
    assert np.isfinite(result.log_pe)
