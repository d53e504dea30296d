from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import yaml

from .config import DEFAULT_SWEEP_THREADS, load_numerics_config
from .errors import DomainError
from .query import BoundKind, Method

logger = logging.getLogger(__name__)

AXES = ("n", "snr_db", "rate", "pe")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class SweepConfig:
    channel: str
    axis: str
    grid: Tuple[float, ...]
    kinds: Tuple[BoundKind, ...]
    # channel parameters held fixed (snr_db, p_bit, powers, ...)
    params: Dict[str, Any] = field(default_factory=dict)
    n: Optional[int] = None
    rate: Optional[float] = None
    pe: Optional[float] = None
    method: Method = Method.ASYM2
    output_path: Optional[Path] = None
    format: str = "csv"
    seed: int = 0
    samples: Optional[int] = None
    threads: int = DEFAULT_SWEEP_THREADS
    timing: bool = False

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise DomainError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}, got {self.format!r}")
        if not self.grid:
            raise DomainError("sweep grid is empty")
        steps = np.diff(np.asarray(self.grid, dtype=float))
        if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
            raise DomainError("sweep grid must be strictly monotone")
        if not self.kinds:
            raise DomainError("at least one bound kind is required")
        if self.threads < 1:
            raise DomainError("threads must be positive")
        if self.axis == "n" and any(float(x) != int(x) for x in self.grid):
            raise DomainError("blocklength grid must hold integers")
        # exactly one of rate / pe is the target, unless the axis supplies it
        targets = {"rate": self.rate, "pe": self.pe}
        if self.axis in targets:
            other = "pe" if self.axis == "rate" else "rate"
            if targets[other] is not None:
                raise DomainError(f"axis {self.axis} leaves no room for a fixed {other}")
        elif (self.rate is None) == (self.pe is None):
            raise DomainError("give exactly one of rate / pe")
        if self.axis != "n" and self.n is None:
            raise DomainError("a fixed n is required unless sweeping n")

    def point(self, index: int) -> Dict[str, Any]:
        """Query inputs at one grid index."""
        value = self.grid[index]
        out: Dict[str, Any] = {
            "n": self.n,
            "rate": self.rate,
            "pe": self.pe,
            "params": dict(self.params),
        }
        if self.axis == "n":
            out["n"] = int(value)
        elif self.axis == "snr_db":
            out["params"]["snr_db"] = float(value)
            out["params"].pop("snr", None)
        else:
            out[self.axis] = float(value)
        return out


def expand_grid(spec: Any) -> Tuple[float, ...]:
    """Explicit list, or a mapping with start/stop/points and scale lin|log."""
    if isinstance(spec, Mapping):
        start, stop = float(spec["start"]), float(spec["stop"])
        points = int(spec.get("points", 10))
        scale = str(spec.get("scale", "lin")).lower()
        if points < 1:
            raise DomainError("grid needs at least one point")
        if scale == "log":
            if start <= 0.0 or stop <= 0.0:
                raise DomainError("log grids need positive endpoints")
            values = np.geomspace(start, stop, points)
        elif scale == "lin":
            values = np.linspace(start, stop, points)
        else:
            raise DomainError(f"grid scale must be lin or log, got {scale!r}")
        return tuple(float(v) for v in values)
    if isinstance(spec, (list, tuple)):
        return tuple(float(v) for v in spec)
    raise DomainError(f"cannot read a grid from {spec!r}")


def sweep_config_from_dict(data: Mapping[str, Any], base_dir: Optional[Path] = None) -> SweepConfig:
    try:
        channel = str(data["channel"]).lower()
        axis = str(data["axis"])
        grid = expand_grid(data["grid"])
    except KeyError as exc:
        raise DomainError(f"sweep config is missing {exc.args[0]!r}") from None
    if axis == "n":
        grid = tuple(float(int(round(x))) for x in grid)
    kinds_raw: List[Any] = data.get("bound_kinds") or data.get("kinds") or ["meta-converse"]
    output = data.get("output_path")
    output_path = None
    if output:
        output_path = Path(output)
        if base_dir is not None and not output_path.is_absolute():
            output_path = base_dir / output_path
    return SweepConfig(
        channel=channel,
        axis=axis,
        grid=grid,
        kinds=tuple(BoundKind.parse(k) for k in kinds_raw),
        params=dict(data.get("params") or {}),
        n=int(data["n"]) if data.get("n") is not None else None,
        rate=float(data["rate"]) if data.get("rate") is not None else None,
        pe=float(data["pe"]) if data.get("pe") is not None else None,
        method=Method.parse(data.get("method", Method.ASYM2)),
        output_path=output_path,
        format=str(data.get("format", "csv")).lower(),
        seed=int(data.get("seed", 0)),
        samples=int(data["samples"]) if data.get("samples") is not None else None,
        threads=int(data.get("threads") or load_numerics_config().sweep_threads),
        timing=bool(data.get("timing", False)),
    )


def load_sweep_config(path: Path) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, Mapping):
        raise DomainError(f"sweep config {path} must be a mapping")
    config = sweep_config_from_dict(data, base_dir=Path(path).parent)
    logger.info(
        "Loaded sweep config from %s (channel=%s axis=%s points=%s kinds=%s)",
        path,
        config.channel,
        config.axis,
        len(config.grid),
        ",".join(k.value for k in config.kinds),
    )
    return config
