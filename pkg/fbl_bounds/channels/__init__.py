from __future__ import annotations

import os
from typing import Any

import numpy as np

from ..config import load_numerics_config
from ..specs import BiAwgnSpec, BscSpec, ChannelSpec, ParallelAwgnSpec, awgn_spec, snr_from_db
from .awgn import AwgnChannel
from .base import Channel, LaplaceChannel
from .biawgn import BiAwgnChannel
from .bsc import BscChannel, bsc_from_snr

DEFAULT_CHANNEL = "awgn"


def make_spec(name: str | None = None, **params: Any) -> ChannelSpec:
    """Build a channel spec from loose parameters (CLI flags, sweep YAML).

    awgn / biawgn take ``snr`` or ``snr_db``; parallel-awgn takes ``snr`` as a
    list or ``powers`` with ``noise``; bsc takes ``p_bit`` or an SNR of the
    underlying BPSK link.
    """
    channel_name = (name or os.environ.get("FBL_CHANNEL") or DEFAULT_CHANNEL).lower()
    snr = params.get("snr")
    if snr is None and params.get("snr_db") is not None:
        snr = snr_from_db(float(params["snr_db"]))
    if channel_name == "awgn":
        if snr is None:
            raise ValueError("awgn needs snr or snr_db")
        return awgn_spec(float(snr))
    if channel_name == "parallel-awgn":
        if params.get("powers") is not None:
            return ParallelAwgnSpec.from_powers(params["powers"], params["noise"])
        if snr is None:
            raise ValueError("parallel-awgn needs snr values or powers and noise")
        return ParallelAwgnSpec(snr=tuple(float(x) for x in np.atleast_1d(snr)))
    if channel_name == "biawgn":
        if snr is None:
            raise ValueError("biawgn needs snr or snr_db")
        order = params.get("quadrature_order")
        return BiAwgnSpec(float(snr)) if order is None else BiAwgnSpec(float(snr), int(order))
    if channel_name == "bsc":
        if params.get("p_bit") is not None:
            return BscSpec(float(params["p_bit"]))
        if snr is None:
            raise ValueError("bsc needs p_bit or the SNR of the underlying link")
        return bsc_from_snr(float(snr))
    raise ValueError(f"Unknown channel: {channel_name}")


def channel_for(spec: ChannelSpec) -> Channel:
    if isinstance(spec, ParallelAwgnSpec):
        return AwgnChannel(spec)
    if isinstance(spec, BiAwgnSpec):
        return BiAwgnChannel(spec, load_numerics_config().agreement_tol)
    if isinstance(spec, BscSpec):
        return BscChannel(spec)
    raise TypeError(f"not a channel spec: {spec!r}")


def get_channel(name: str | None = None, **params: Any) -> Channel:
    return channel_for(make_spec(name, **params))


__all__ = [
    "AwgnChannel",
    "BiAwgnChannel",
    "BscChannel",
    "Channel",
    "LaplaceChannel",
    "channel_for",
    "get_channel",
    "make_spec",
]
