"""Single entry point for every (bound kind, channel) pair."""

from __future__ import annotations

import logging
import math
from dataclasses import replace

from .channels import BiAwgnChannel, channel_for
from .channels.base import normal_approx
from .errors import Unsupported
from .query import BoundKind, BoundQuery, BoundResult, Direction
from .specfun import LOG2E, gauss_q
from .specs import BiAwgnSpec, channel_name

logger = logging.getLogger(__name__)


def normal_approx_pe(n: int, rate_R: float, capacity_C: float, dispersion_V: float) -> float:
    """Error probability at which normal_approx returns rate_R."""
    gap = capacity_C - rate_R + math.log2(n) / (2.0 * n)
    return float(gauss_q(gap / (math.sqrt(dispersion_V / n) * LOG2E)))


def _normal_approx_result(query: BoundQuery) -> BoundResult:
    channel = channel_for(query.channel)
    capacity, dispersion = channel.capacity(), channel.dispersion()
    if query.direction is Direction.RATE_GIVEN_PE:
        value = normal_approx(query.n, query.pe, capacity, dispersion)
        log_pe = math.log(query.pe)
    else:
        value = normal_approx_pe(query.n, query.rate, capacity, dispersion)
        log_pe = math.log(value) if value > 0.0 else -math.inf
    return BoundResult(
        query=query,
        value=value,
        method="closed-form",
        log_pe=log_pe,
        diagnostics={"capacity": capacity, "dispersion": dispersion},
    )


def compute_bound(query: BoundQuery) -> BoundResult:
    kind = query.kind
    logger.debug(
        "[bound] kind=%s channel=%s n=%s method=%s",
        kind.value,
        channel_name(query.channel),
        query.n,
        query.method.value,
    )
    if kind is BoundKind.NORMAL_APPROX:
        return _normal_approx_result(query)
    channel = channel_for(query.channel)
    if kind is BoundKind.META_CONVERSE:
        return channel.converse(query)
    if kind is BoundKind.RCU:
        if isinstance(query.channel, BiAwgnSpec):
            raise Unsupported("RCU is not available for the BI-AWGN channel; use kappa-beta")
        return channel.achievability(query)
    if kind is BoundKind.KAPPA_BETA:
        if not isinstance(channel, BiAwgnChannel):
            raise Unsupported(f"kappa-beta is provided for BI-AWGN only, not {channel.name}")
        return channel.kappa_beta(query)
    raise Unsupported(f"unknown bound kind {kind!r}")


def achievable_bound(query: BoundQuery) -> BoundResult:
    """RCU where it exists, kappa-beta for BI-AWGN."""
    kind = BoundKind.KAPPA_BETA if isinstance(query.channel, BiAwgnSpec) else BoundKind.RCU
    return compute_bound(replace(query, kind=kind))
