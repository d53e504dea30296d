from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from .errors import DomainError


@dataclass(frozen=True)
class ParallelAwgnSpec:
    """K parallel real AWGN channels sharing one codeword of length n."""

    snr: Tuple[float, ...]
    # Optional physical description; snr_k = powers_k / noise_k.
    powers: Optional[Tuple[float, ...]] = None
    noise: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if not self.snr:
            raise DomainError("at least one sub-channel is required")
        if any(not math.isfinite(x) or x < 0.0 for x in self.snr):
            raise DomainError(f"SNR values must be finite and non-negative: {self.snr}")
        if max(self.snr) <= 0.0:
            raise DomainError("at least one sub-channel needs positive SNR")

    @property
    def K(self) -> int:
        return len(self.snr)

    @classmethod
    def from_powers(cls, powers: Sequence[float], noise: Sequence[float]) -> "ParallelAwgnSpec":
        if len(powers) != len(noise):
            raise DomainError("powers and noise vectors differ in length")
        if any(s <= 0.0 for s in noise):
            raise DomainError("noise variances must be positive")
        return cls(
            snr=tuple(float(p) / float(s) for p, s in zip(powers, noise)),
            powers=tuple(float(p) for p in powers),
            noise=tuple(float(s) for s in noise),
        )


def awgn_spec(snr: float) -> ParallelAwgnSpec:
    if not snr > 0.0:
        raise DomainError(f"AWGN SNR must be positive, got {snr!r}")
    return ParallelAwgnSpec(snr=(float(snr),))


@dataclass(frozen=True)
class BiAwgnSpec:
    snr_Omega: float
    quadrature_order: int = 200

    def __post_init__(self) -> None:
        if not self.snr_Omega > 0.0:
            raise DomainError(f"BI-AWGN SNR must be positive, got {self.snr_Omega!r}")
        if self.quadrature_order < 64:
            raise DomainError("quadrature_order must be at least 64")


@dataclass(frozen=True)
class BscSpec:
    p_bit: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p_bit < 0.5:
            raise DomainError(f"crossover probability must lie in (0, 0.5), got {self.p_bit!r}")

    @property
    def delta0(self) -> float:
        return math.log((1.0 - self.p_bit) / self.p_bit)


ChannelSpec = Union[ParallelAwgnSpec, BiAwgnSpec, BscSpec]


def channel_name(spec: ChannelSpec) -> str:
    if isinstance(spec, ParallelAwgnSpec):
        return "awgn" if spec.K == 1 else "parallel-awgn"
    if isinstance(spec, BiAwgnSpec):
        return "biawgn"
    if isinstance(spec, BscSpec):
        return "bsc"
    raise TypeError(f"not a channel spec: {spec!r}")


def snr_from_db(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def snr_from_ebn0_db(ebn0_db: float, rate: float) -> float:
    """Omega = 2 R Eb/N0 for real signalling at R bits per channel use."""
    if not rate > 0.0:
        raise DomainError("Eb/N0 conversion needs a positive rate")
    return 2.0 * rate * snr_from_db(ebn0_db)
