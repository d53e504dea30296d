from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from .errors import DomainError, InfeasibleQuery
from .specs import ChannelSpec, ParallelAwgnSpec, channel_name


class Direction(str, Enum):
    # rate upper/lower bound at a target error probability
    RATE_GIVEN_PE = "rate"
    # error-probability bound at a target rate
    PE_GIVEN_RATE = "pe"


class BoundKind(str, Enum):
    META_CONVERSE = "meta-converse"
    RCU = "rcu"
    KAPPA_BETA = "kappa-beta"
    NORMAL_APPROX = "normal-approx"

    @classmethod
    def parse(cls, name: str | "BoundKind") -> "BoundKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"na": "normal-approx", "converse": "meta-converse", "kb": "kappa-beta"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"Unknown bound kind: {name}") from None


class Method(str, Enum):
    EXACT = "exact"
    INTEGRAL = "integral"
    ASYM1 = "asym1"
    ASYM2 = "asym2"
    MONTE_CARLO = "monte-carlo"

    @classmethod
    def parse(cls, name: str | "Method") -> "Method":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {
            "asymptotic1": "asym1",
            "asymptotic-1": "asym1",
            "asymptotic2": "asym2",
            "asymptotic-2": "asym2",
            "asymptotic": "asym2",
            "mc": "monte-carlo",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"Unknown method: {name}") from None

    @property
    def order(self) -> Optional[int]:
        return {Method.ASYM1: 1, Method.ASYM2: 2}.get(self)

    @property
    def is_asymptotic(self) -> bool:
        return self.order is not None


@dataclass(frozen=True)
class BoundQuery:
    channel: ChannelSpec
    n: int
    rate: Optional[float] = None
    pe: Optional[float] = None
    kind: BoundKind = BoundKind.META_CONVERSE
    method: Method = Method.ASYM2
    samples: Optional[int] = None
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", BoundKind.parse(self.kind))
        object.__setattr__(self, "method", Method.parse(self.method))
        if (self.rate is None) == (self.pe is None):
            raise DomainError("give exactly one of rate / pe")
        if self.n < 1:
            raise DomainError(f"blocklength must be positive, got {self.n}")
        if isinstance(self.channel, ParallelAwgnSpec) and self.n % self.channel.K:
            raise DomainError(f"n={self.n} is not a multiple of K={self.channel.K}")
        if self.pe is not None and not 0.0 < self.pe < 1.0:
            raise DomainError(f"pe must lie in (0, 1), got {self.pe!r}")
        if self.rate is not None and not self.rate > 0.0:
            raise DomainError(f"rate must be positive, got {self.rate!r}")

    @property
    def direction(self) -> Direction:
        return Direction.RATE_GIVEN_PE if self.pe is not None else Direction.PE_GIVEN_RATE

    def require_small_error(self) -> None:
        """Converse feasibility: 0 < pe < 1/2 or R > 1/n."""
        if self.direction is Direction.RATE_GIVEN_PE and not self.pe < 0.5:
            raise InfeasibleQuery(f"pe={self.pe} outside (0, 1/2)")
        if self.direction is Direction.PE_GIVEN_RATE and not self.rate > 1.0 / self.n:
            raise InfeasibleQuery(f"rate={self.rate} not above 1/n={1.0 / self.n:g}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "channel": channel_name(self.channel),
            "params": asdict(self.channel),
            "n": self.n,
            "rate": self.rate,
            "pe": self.pe,
            "direction": self.direction.value,
            "kind": self.kind.value,
            "method": self.method.value,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class BoundResult:
    query: BoundQuery
    # rate in bits/use for RATE_GIVEN_PE, error probability otherwise
    value: float
    method: str
    # (lower, upper) in the units of value
    bracket: Optional[Tuple[float, float]] = None
    certified: Optional[bool] = None
    log_pe: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "query": self.query.to_dict(),
            "value": _json_number(self.value),
            "log_pe": _json_number(self.log_pe),
            "bracket": None
            if self.bracket is None
            else [_json_number(self.bracket[0]), _json_number(self.bracket[1])],
            "certified": self.certified,
            "method": self.method,
            "diagnostics": {k: _json_number(v) for k, v in self.diagnostics.items()},
        }


def _json_number(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_json_number(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if hasattr(value, "item"):
        return _json_number(value.item())
    return value
