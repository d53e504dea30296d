from __future__ import annotations

import math

import pytest

from fbl_bounds.bounds_api import achievable_bound, compute_bound, normal_approx_pe
from fbl_bounds.channels.base import normal_approx
from fbl_bounds.errors import DomainError, InfeasibleQuery, Unsupported
from fbl_bounds.query import BoundKind, BoundQuery, Method
from fbl_bounds.specs import BiAwgnSpec, BscSpec, ParallelAwgnSpec, awgn_spec


def test_normal_approximation_value() -> None:
    assert normal_approx(1000, 1e-3, 0.5, 0.375) == pytest.approx(0.41865, abs=1e-4)
    query = BoundQuery(channel=awgn_spec(1.0), n=1000, pe=1e-3, kind="na")
    result = compute_bound(query)
    assert result.value == pytest.approx(0.41865, abs=1e-4)
    assert result.method == "closed-form"
    assert result.diagnostics["dispersion"] == pytest.approx(0.375)


def test_normal_approximation_inverse() -> None:
    rate = normal_approx(500, 1e-4, 0.5, 0.375)
    assert normal_approx_pe(500, rate, 0.5, 0.375) == pytest.approx(1e-4, rel=1e-9)
    query = BoundQuery(channel=awgn_spec(1.0), n=500, rate=rate, kind=BoundKind.NORMAL_APPROX)
    result = compute_bound(query)
    assert result.value == pytest.approx(1e-4, rel=1e-9)
    assert result.log_pe == pytest.approx(math.log(1e-4), abs=1e-9)


def test_rcu_unsupported_for_biawgn() -> None:
    query = BoundQuery(channel=BiAwgnSpec(1.0), n=200, pe=1e-3, kind=BoundKind.RCU)
    with pytest.raises(Unsupported):
        compute_bound(query)


@pytest.mark.parametrize("spec", [awgn_spec(1.0), BscSpec(0.11)])
def test_kappa_beta_only_for_biawgn(spec) -> None:
    query = BoundQuery(channel=spec, n=200, pe=1e-3, kind=BoundKind.KAPPA_BETA)
    with pytest.raises(Unsupported):
        compute_bound(query)


def test_achievable_bound_dispatches_by_channel() -> None:
    awgn = achievable_bound(BoundQuery(channel=awgn_spec(1.0), n=200, rate=0.3))
    assert awgn.query.kind is BoundKind.RCU
    bsc = achievable_bound(BoundQuery(channel=BscSpec(0.11), n=200, rate=0.3, method="exact"))
    assert bsc.query.kind is BoundKind.RCU
    biawgn = achievable_bound(BoundQuery(channel=BiAwgnSpec(1.0), n=500, pe=1e-3))
    assert biawgn.query.kind is BoundKind.KAPPA_BETA


@pytest.mark.parametrize(
    "spec,method",
    [(awgn_spec(1.0), Method.ASYM2), (BscSpec(0.11), Method.EXACT)],
)
def test_achievability_below_converse(spec, method: Method) -> None:
    converse = compute_bound(BoundQuery(channel=spec, n=500, pe=1e-3, method=method))
    achievable = achievable_bound(BoundQuery(channel=spec, n=500, pe=1e-3, method=method))
    assert 0.0 < achievable.value <= converse.value


def test_converse_error_probability_below_rcu() -> None:
    query = BoundQuery(channel=awgn_spec(1.0), n=200, rate=0.3, method=Method.INTEGRAL)
    converse = compute_bound(query)
    rcu = achievable_bound(query)
    assert converse.value <= rcu.value
    assert converse.log_pe <= rcu.log_pe


def test_query_validation() -> None:
    with pytest.raises(DomainError):
        BoundQuery(channel=awgn_spec(1.0), n=200)
    with pytest.raises(DomainError):
        BoundQuery(channel=awgn_spec(1.0), n=200, rate=0.3, pe=1e-3)
    with pytest.raises(DomainError):
        BoundQuery(channel=ParallelAwgnSpec(snr=(1.0, 2.0)), n=201, pe=1e-3)
    with pytest.raises(DomainError):
        BoundQuery(channel=awgn_spec(1.0), n=200, pe=1.5)
    with pytest.raises(ValueError):
        BoundQuery(channel=awgn_spec(1.0), n=200, pe=1e-3, method="simpson")


def test_converse_infeasible_at_rate_below_one_over_n() -> None:
    query = BoundQuery(channel=awgn_spec(1.0), n=100, rate=0.005)
    with pytest.raises(InfeasibleQuery):
        compute_bound(query)


def test_result_serialises_query() -> None:
    result = compute_bound(BoundQuery(channel=awgn_spec(1.0), n=200, pe=1e-3))
    payload = result.to_dict()
    assert payload["query"]["channel"] == "awgn"
    assert payload["query"]["direction"] == "rate"
    assert payload["query"]["method"] == "asym2"
    assert payload["value"] == pytest.approx(result.value)
    assert len(payload["bracket"]) == 2


CHANNELS = [
    (awgn_spec(1.0), Method.ASYM2),
    (BscSpec(0.11), Method.EXACT),
    (BiAwgnSpec(1.0), Method.ASYM2),
]


@pytest.mark.slow
@pytest.mark.parametrize("spec,method", CHANNELS)
@pytest.mark.parametrize("n", [200, 500, 1000])
@pytest.mark.parametrize("pe", [1e-2, 1e-3, 1e-4])
def test_achievability_never_exceeds_converse(spec, method: Method, n: int, pe: float) -> None:
    query = BoundQuery(channel=spec, n=n, pe=pe, method=method)
    converse = compute_bound(query)
    achievable = achievable_bound(query)
    assert achievable.value <= converse.value


@pytest.mark.slow
@pytest.mark.parametrize("spec,method", CHANNELS)
def test_converse_gap_to_normal_approximation_scales_as_one_over_n(spec, method: Method) -> None:
    gaps = []
    for n in (1_000, 10_000, 100_000):
        bound = compute_bound(BoundQuery(channel=spec, n=n, pe=1e-3, method=method)).value
        approx = compute_bound(
            BoundQuery(channel=spec, n=n, pe=1e-3, kind=BoundKind.NORMAL_APPROX)
        ).value
        gaps.append(n * abs(bound - approx))
    assert min(gaps) > 0.0
    assert max(gaps) / min(gaps) <= 5.0
