from __future__ import annotations

import math

import pytest
from scipy import integrate

from fbl_bounds.channels.biawgn import (
    BiAwgnChannel,
    biawgn_capacity,
    biawgn_capacity_from_transform,
    biawgn_converse,
    biawgn_dispersion,
    biawgn_fa_md,
    biawgn_kernel,
    h_llr,
    h_transform,
    kappa_beta,
)
from fbl_bounds.query import BoundKind, BoundQuery, Method
from fbl_bounds.specfun import LN2
from fbl_bounds.specs import BiAwgnSpec


@pytest.mark.parametrize("snr", [0.25, 1.0, 4.0])
def test_transform_identities(snr: float) -> None:
    spec = BiAwgnSpec(snr)
    assert h_transform(0.0, 0, spec) == pytest.approx(1.0, abs=1e-12)
    assert h_transform(-1.0, 0, spec) == pytest.approx(2.0, abs=1e-9)


def test_h_llr_is_stable_for_large_negative_input() -> None:
    assert h_llr(-400.0) == pytest.approx(800.0)
    assert h_llr(400.0) == pytest.approx(0.0, abs=1e-300)


@pytest.mark.parametrize("snr", [0.5, 1.0, 3.0])
def test_capacity_formulas_agree(snr: float) -> None:
    spec = BiAwgnSpec(snr)
    assert biawgn_capacity(spec) == pytest.approx(biawgn_capacity_from_transform(spec), abs=1e-8)


def test_capacity_limits() -> None:
    assert biawgn_capacity(BiAwgnSpec(40.0)) > 0.999
    assert 0.0 < biawgn_capacity(BiAwgnSpec(1e-3)) < 2e-3


def test_kernels_vanish_at_origin() -> None:
    spec = BiAwgnSpec(1.0)
    for lam in (0.3, 0.5, 0.9):
        alpha, beta = biawgn_kernel(spec, lam)
        assert abs(beta.value(0.0)) < 1e-12
        assert abs(alpha.value(0.0)) < 1e-9


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_kernel_derivatives_match_finite_differences(order: int) -> None:
    _, beta = biawgn_kernel(BiAwgnSpec(1.0), 0.4)
    s, h = -0.3, 1e-5
    if order == 1:
        numeric = (beta.value(s + h) - beta.value(s - h)) / (2 * h)
    else:
        numeric = (beta.deriv(s + h, order - 1) - beta.deriv(s - h, order - 1)) / (2 * h)
    assert beta.deriv(s, order) == pytest.approx(numeric, rel=1e-6)


def test_dispersion_is_variance_of_llr() -> None:
    spec = BiAwgnSpec(1.0)

    def moment(power: int) -> float:
        value, _ = integrate.quad(
            lambda z: float(h_llr(1.0 + z)) ** power * math.exp(-0.5 * z * z),
            -math.inf,
            math.inf,
            epsabs=1e-14,
            epsrel=1e-12,
        )
        return value / math.sqrt(2.0 * math.pi)

    variance = moment(2) - moment(1) ** 2
    assert biawgn_dispersion(spec) == pytest.approx(variance, rel=1e-8)
    _, beta = biawgn_kernel(spec, 0.5)
    assert beta.deriv(0.0, 2) / 2.0 == pytest.approx(variance, rel=1e-8)


def test_saddles_at_capacity_threshold() -> None:
    spec = BiAwgnSpec(1.0)
    channel = BiAwgnChannel(spec)
    md_centre, _ = channel.lambda_centres()
    assert md_centre == pytest.approx((1.0 - biawgn_capacity(spec)) * LN2, abs=1e-8)
    sa, sb = channel.saddles(md_centre)
    assert sb.s_star == pytest.approx(0.0, abs=1e-8)
    assert sa.s_star == pytest.approx(1.0, abs=1e-8)


@pytest.mark.slow
def test_integral_agrees_with_monte_carlo() -> None:
    spec = BiAwgnSpec(1.0)
    channel = BiAwgnChannel(spec)
    _, beta = biawgn_kernel(spec, 0.5)
    n = 100
    md_centre, fa_centre = channel.lambda_centres()
    md_lam = md_centre + 1.5 * math.sqrt(biawgn_dispersion(spec) / n)
    fa_lam = fa_centre - 1.5 * math.sqrt(beta.deriv(-1.0, 2) / 2.0 / n)

    md = biawgn_fa_md(n, md_lam, spec, Method.INTEGRAL).log_md
    fa = biawgn_fa_md(n, fa_lam, spec, Method.INTEGRAL).log_fa
    md_mc = biawgn_fa_md(n, md_lam, spec, Method.MONTE_CARLO, samples=200_000, seed=21)
    fa_mc = biawgn_fa_md(n, fa_lam, spec, Method.MONTE_CARLO, samples=200_000, seed=22)
    assert abs(math.exp(md_mc.log_md) - math.exp(md)) <= 4.0 * md_mc.stderr_md
    assert abs(math.exp(fa_mc.log_fa) - math.exp(fa)) <= 4.0 * fa_mc.stderr_fa


def test_converse_flags_order_agreement() -> None:
    spec = BiAwgnSpec(1.0)
    result = biawgn_converse(BoundQuery(channel=spec, n=500, pe=1e-3))
    assert result.certified is False
    assert result.diagnostics["orders_agree"] is True


def test_converse_sanity_envelope() -> None:
    spec = BiAwgnSpec(1.0)
    channel = BiAwgnChannel(spec)
    result = biawgn_converse(BoundQuery(channel=spec, n=200, pe=1e-3))
    assert result.value < channel.capacity()
    assert result.value > channel.normal_approx(200, 1e-3) - 0.05


def test_converse_approaches_capacity() -> None:
    spec = BiAwgnSpec(1.0)
    channel = BiAwgnChannel(spec)
    n = 50_000
    result = biawgn_converse(BoundQuery(channel=spec, n=n, pe=1e-3))
    assert result.value < channel.capacity()
    assert result.value == pytest.approx(channel.normal_approx(n, 1e-3), abs=2e-3)


def test_kappa_beta_below_converse() -> None:
    spec = BiAwgnSpec(1.0)
    converse = biawgn_converse(BoundQuery(channel=spec, n=500, pe=1e-3))
    query = BoundQuery(channel=spec, n=500, pe=1e-3, kind=BoundKind.KAPPA_BETA)
    achievable = kappa_beta(query)
    assert 0.0 < achievable.value < converse.value
    assert 0.0 < achievable.diagnostics["alpha_split"] < 1.0


def test_kappa_beta_error_probability_direction() -> None:
    spec = BiAwgnSpec(1.0)
    query = BoundQuery(channel=spec, n=500, rate=0.3, kind=BoundKind.KAPPA_BETA)
    achievable = kappa_beta(query)
    converse = biawgn_converse(BoundQuery(channel=spec, n=500, rate=0.3))
    assert converse.value < achievable.value < 1.0
