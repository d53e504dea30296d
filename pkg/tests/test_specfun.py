from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from fbl_bounds.errors import DomainError
from fbl_bounds.specfun import (
    bernoulli_numbers,
    bernoulli_table,
    binary_entropy,
    g_infinity,
    g_nu,
    g_nu_deriv,
    gauss_q,
    gauss_q_inv,
    log_binom_pmf,
    log_gauss_q,
)


def test_gauss_q_symmetry_and_tail() -> None:
    assert gauss_q(0.0) == 0.5
    for x in (-2.0, -0.3, 0.4, 1.7):
        assert gauss_q(x) == pytest.approx(1.0 - gauss_q(-x), abs=1e-15)
    assert gauss_q(gauss_q_inv(1e-3)) == pytest.approx(1.0e-3, rel=1e-12)


def test_log_gauss_q_deep_tail_matches_mpmath() -> None:
    for x in (5.0, 20.0, 40.0):
        expected = float(mpmath.log(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2))
        assert log_gauss_q(x) == pytest.approx(expected, rel=1e-12)


def test_gauss_q_inv_round_trip() -> None:
    assert gauss_q_inv(0.5) == pytest.approx(0.0, abs=1e-15)
    assert gauss_q_inv(1e-3) == pytest.approx(3.0902, abs=1e-4)
    for p in (1e-12, 1e-6, 0.2, 0.9, 1.0 - 1e-12):
        assert gauss_q(gauss_q_inv(p)) == pytest.approx(p, abs=1e-9, rel=1e-9)
    assert gauss_q_inv(0.1) == pytest.approx(-gauss_q_inv(0.9), rel=1e-12)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_gauss_q_inv_rejects_outside_unit_interval(p: float) -> None:
    with pytest.raises(DomainError):
        gauss_q_inv(p)


def test_log_binom_pmf_small_counts() -> None:
    assert log_binom_pmf(4, 2, 0.5) == pytest.approx(math.log(0.375), rel=1e-14)
    assert log_binom_pmf(30, 0, 0.2) == pytest.approx(30 * math.log(0.8), rel=1e-14)


def test_log_binom_pmf_matches_exact_rationals() -> None:
    n, d = 1000, 110
    eps = Fraction(11, 100)
    exact = math.comb(n, d) * eps**d * (1 - eps) ** (n - d)
    expected = float(mpmath.log(mpmath.mpf(exact.numerator) / exact.denominator))
    assert log_binom_pmf(n, d, 0.11) == pytest.approx(expected, rel=1e-11)


def test_log_binom_pmf_vectorized_sums_to_one() -> None:
    logs = log_binom_pmf(200, np.arange(201), 0.3)
    assert np.exp(logs).sum() == pytest.approx(1.0, abs=1e-12)


def test_binary_entropy_values() -> None:
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.49991, abs=1e-5)


def test_bernoulli_numbers_exact() -> None:
    numbers = bernoulli_numbers(8)
    assert numbers[:3] == (Fraction(1), Fraction(-1, 2), Fraction(1, 6))
    assert numbers[4] == Fraction(-1, 30)
    assert numbers[8] == Fraction(-1, 30)
    assert all(numbers[k] == 0 for k in (3, 5, 7))


def test_bernoulli_table_matches_mpmath() -> None:
    table = bernoulli_table(12)
    assert table.kmax == 12
    for k in range(13):
        assert table.b2k(k) == pytest.approx(float(mpmath.bernoulli(2 * k)), rel=1e-14)


def test_g_nu_vanishes_at_zero() -> None:
    for nu in (1.0, 10.0, 500.0):
        assert g_nu(nu, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert g_nu_deriv(nu, 0.0, 1) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("nu,s", [(1.0, 0.4), (10.0, 0.7), (25.0, -1.3), (50.0, 2.0)])
def test_g_nu_series_matches_mpmath(nu: float, s: float) -> None:
    mpmath.mp.dps = 30
    expected = float(mpmath.log(mpmath.hyp0f1(nu, (mpmath.mpf(nu) * s / 2) ** 2)) / nu)
    assert g_nu(nu, s, method="series") == pytest.approx(expected, rel=1e-10)


def test_g_nu_asymptotic_close_to_series() -> None:
    series = g_nu(10.0, 0.7, method="series")
    asymptotic = g_nu(10.0, 0.7, method="asymptotic")
    assert abs(series - asymptotic) < 1e-2


def test_g_nu_tends_to_limit_function() -> None:
    s = 0.9
    gaps = [abs(g_nu(nu, s, method="asymptotic") - g_infinity(s)) for nu in (10, 100, 1000)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


@pytest.mark.parametrize("method", ["series", "asymptotic"])
def test_g_nu_derivatives_match_finite_differences(method: str) -> None:
    nu, s, h = 20.0, -0.5, 1e-4
    g = lambda x: g_nu(nu, x, method=method)  # noqa: E731
    first = (g(s + h) - g(s - h)) / (2 * h)
    second = (g(s + h) - 2 * g(s) + g(s - h)) / (h * h)
    assert g_nu_deriv(nu, s, 1, method=method) == pytest.approx(first, rel=1e-6)
    assert g_nu_deriv(nu, s, 2, method=method) == pytest.approx(second, rel=1e-4)
    assert g_nu_deriv(nu, s, 2, method=method) > 0.0


def test_g_nu_rejects_small_nu_and_bad_order() -> None:
    with pytest.raises(DomainError):
        g_nu(0.5, 0.1)
    with pytest.raises(ValueError):
        g_nu_deriv(10.0, 0.1, 3)
    with pytest.raises(ValueError):
        g_nu(10.0, 0.1, method="bogus")
