from __future__ import annotations

import math

import pytest
from scipy import integrate

from fbl_bounds.channels.awgn import AwgnChannel, awgn_capacity, awgn_converse
from fbl_bounds.channels.awgn_rcu import (
    rcu_context,
    rcu_dispersion_check,
    rcu_exact_log_g,
    rcu_lambda,
    rcu_log_f_rho,
    rcu_log_g,
    rcu_monte_carlo,
    rcu_pe,
    rcu_rate,
    rcu_rho_log_cdf,
    rcu_u_terms,
    rcu_v_n,
    rcu_w_terms,
)
from fbl_bounds.errors import InfeasibleQuery, TailAssumptionViolated
from fbl_bounds.query import BoundKind, BoundQuery, Method
from fbl_bounds.specfun import LN2
from fbl_bounds.specs import awgn_spec


def test_density_exponent_at_zero_correlation() -> None:
    u0, _ = rcu_u_terms(0.0, 1.0)
    assert u0 == pytest.approx(-0.5)
    w0, w1 = rcu_w_terms(0.3, 2.0)
    assert w1 > 1.0 and math.isfinite(w0)
    assert rcu_w_terms(1e-9, 2.0)[1] == pytest.approx(1.0, abs=1e-8)


def test_rho_density_integrates_to_one() -> None:
    ctx = rcu_context(200, 0.3, 1.0)
    total, _ = integrate.quad(
        lambda a: math.exp(rcu_log_f_rho(a, ctx)),
        -1.0 + 1e-12,
        1.0 - 1e-12,
        limit=200,
        points=[math.sqrt(0.5)],
    )
    assert total == pytest.approx(1.0, rel=0.02)


@pytest.mark.parametrize("a", [0.7, 0.8, 0.9])
def test_tail_saddle_matches_student_t(a: float) -> None:
    assert rcu_log_g(a, 100) == pytest.approx(rcu_exact_log_g(a, 100), abs=0.05)


def test_tail_exponent_large_n_form() -> None:
    n, a = 2000, 0.6
    expected = -0.5 * math.log(1.0 - a * a) + math.log(n) / (2.0 * n)
    assert rcu_v_n(a, n) == pytest.approx(expected, abs=5e-3)


def test_tail_rejects_non_positive_correlation() -> None:
    with pytest.raises(TailAssumptionViolated):
        rcu_v_n(0.0, 100)


def test_threshold_solves_rate_constraint() -> None:
    lam = rcu_lambda(0.5, 1000, 1.0)
    assert lam == pytest.approx(0.70466, abs=5e-3)
    assert abs(rcu_v_n(lam, 1000) - 0.5 * LN2) < 1e-12
    assert rcu_lambda(0.5, 100_000, 1.0) == pytest.approx(math.sqrt(0.5), abs=1e-3)


def test_rate_at_or_below_one_over_n_is_infeasible() -> None:
    with pytest.raises(InfeasibleQuery):
        rcu_pe(100, 0.01, 1.0, Method.ASYM2)
    with pytest.raises(InfeasibleQuery):
        rcu_lambda(0.005, 200, 1.0)


def test_asymptotic_within_factor_two_of_integral() -> None:
    asym = rcu_pe(200, 0.5, 1.65, Method.ASYM2)
    integral = rcu_pe(200, 0.5, 1.65, Method.INTEGRAL)
    assert math.exp(integral) == pytest.approx(2.2e-4, rel=0.25)
    assert abs(asym - integral) < math.log(2.0)


def test_exact_close_to_integral() -> None:
    exact = rcu_pe(200, 0.5, 1.65, Method.EXACT)
    integral = rcu_pe(200, 0.5, 1.65, Method.INTEGRAL)
    assert abs(exact - integral) < math.log(2.0)


def test_converse_below_rcu() -> None:
    spec = awgn_spec(1.65)
    converse = awgn_converse(BoundQuery(channel=spec, n=200, rate=0.5, method=Method.INTEGRAL))
    assert converse.value <= math.exp(rcu_pe(200, 0.5, 1.65, Method.EXACT))


def test_rate_inversion_round_trip() -> None:
    rate = rcu_rate(200, 1e-3, 1.0, Method.EXACT)
    assert 1.0 / 200 < rate < awgn_capacity(awgn_spec(1.0))
    assert rcu_pe(200, rate, 1.0, Method.EXACT) == pytest.approx(math.log(1e-3), abs=1e-6)


def test_rate_inversion_refuses_monte_carlo() -> None:
    with pytest.raises(ValueError):
        rcu_rate(200, 1e-3, 1.0, Method.MONTE_CARLO)


def test_channel_achievability_records_threshold() -> None:
    spec = awgn_spec(1.65)
    query = BoundQuery(channel=spec, n=200, rate=0.5, kind=BoundKind.RCU, method=Method.ASYM2)
    result = AwgnChannel(spec).achievability(query)
    assert result.value == pytest.approx(math.exp(result.log_pe))
    assert 0.0 < result.diagnostics["lambda"] < 1.0


def test_dispersion_check_matches_converse_dispersion() -> None:
    assert rcu_dispersion_check(1.0) == pytest.approx(3.0 / 8.0)
    assert rcu_dispersion_check(1e-6) == pytest.approx(1e-6, rel=1e-3)


@pytest.mark.slow
def test_monte_carlo_agrees_with_exact() -> None:
    mean, stderr = rcu_monte_carlo(100, 0.5, 1.0, samples=400_000, seed=5)
    exact = math.exp(rcu_pe(100, 0.5, 1.0, Method.EXACT))
    assert stderr > 0.0
    assert abs(mean - exact) <= 4.0 * stderr


def test_rho_law_reduces_to_eta_law_without_signal() -> None:
    n = 50
    for a in (-0.2, 0.1, 0.3):
        tail = math.exp(rcu_exact_log_g(a, n))
        assert math.exp(rcu_rho_log_cdf(a, n, 0.0)) == pytest.approx(1.0 - tail, rel=1e-9)


def test_rho_law_concentrates_near_normalized_amplitude() -> None:
    # rho -> sqrt(snr / (1 + snr)) ~ 0.707 at snr = 1
    n = 400
    assert math.exp(rcu_rho_log_cdf(0.6, n, 1.0)) < 1e-3
    assert math.exp(rcu_rho_log_cdf(0.8, n, 1.0)) > 0.999
    assert rcu_rho_log_cdf(0.7, n, 2.0) < rcu_rho_log_cdf(0.7, n, 1.0)
