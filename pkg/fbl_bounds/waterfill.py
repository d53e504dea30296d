"""Power allocation over parallel AWGN sub-channels.

Classical water-filling maximises capacity; at finite n the allocation that
maximises the meta-converse rate loads more power into the good sub-channels.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import yaml
from scipy import optimize

from .channels.awgn import AwgnChannel, awgn_capacity
from .errors import DomainError, FblError
from .query import BoundQuery, Method
from .specs import ParallelAwgnSpec

logger = logging.getLogger(__name__)

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class PowerAllocation:
    powers: Tuple[float, ...]
    total: float
    # bits per channel use, averaged over the sub-channels
    achieved_rate: float
    water_level: Optional[float] = None
    converged: bool = True
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "powers": list(self.powers),
            "total": self.total,
            "achieved_rate": self.achieved_rate,
            "water_level": self.water_level,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _check_inputs(noise: Sequence[float], total_power: float) -> np.ndarray:
    sigma2 = np.asarray(noise, dtype=float)
    if sigma2.ndim != 1 or sigma2.size == 0:
        raise DomainError("noise must be a non-empty vector")
    if np.any(sigma2 <= 0.0):
        raise DomainError("noise variances must be positive")
    if not total_power > 0.0:
        raise DomainError(f"total power must be positive, got {total_power!r}")
    return sigma2


def water_level(noise: Sequence[float], total_power: float) -> float:
    """mu with sum_k max(0, mu - sigma_k^2) = total_power."""
    sigma2 = np.sort(_check_inputs(noise, total_power))
    prefix = np.cumsum(sigma2)
    for active in range(sigma2.size, 0, -1):
        mu = (total_power + prefix[active - 1]) / active
        if mu > sigma2[active - 1]:
            return float(mu)
    raise AssertionError("unreachable: one sub-channel is always active")


def project_simplex(values: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = total}."""
    v = np.asarray(values, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    rho = int(np.nonzero(u - css / idx > 0)[0][-1])
    theta = css[rho] / (rho + 1)
    out = np.maximum(v - theta, 0.0)
    # restore the exact sum after the clip
    return out * (total / out.sum())


def classical_waterfill(noise: Sequence[float], total_power: float) -> PowerAllocation:
    sigma2 = _check_inputs(noise, total_power)
    mu = water_level(sigma2, total_power)
    powers = np.maximum(mu - sigma2, 0.0)
    powers *= total_power / powers.sum()
    spec = ParallelAwgnSpec.from_powers(powers, sigma2)
    return PowerAllocation(
        powers=tuple(float(p) for p in powers),
        total=float(total_power),
        achieved_rate=awgn_capacity(spec),
        water_level=mu,
    )


def finite_n_rate(
    n: int, pe: float, noise: Sequence[float], powers: Sequence[float], order: int = 2
) -> float:
    """Order-k meta-converse rate of the allocation, in bits per channel use."""
    spec = ParallelAwgnSpec.from_powers(powers, noise)
    method = Method.ASYM1 if order == 1 else Method.ASYM2
    query = BoundQuery(channel=spec, n=n, pe=pe, method=method)
    return AwgnChannel(spec).converse(query).value


def waterfill_finite_n(
    n: int,
    pe: float,
    noise: Sequence[float],
    total_power: float,
    order: int = 2,
    max_iter: int = 200,
) -> PowerAllocation:
    """Allocation maximising the finite-n meta-converse rate.

    Starts from classical water-filling and never returns a worse allocation
    than the start.
    """
    sigma2 = _check_inputs(noise, total_power)
    if n % sigma2.size:
        raise DomainError(f"n={n} is not a multiple of K={sigma2.size}")
    if not 0.0 < pe < 0.5:
        raise DomainError(f"pe must lie in (0, 1/2), got {pe!r}")
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order!r}")

    start = np.asarray(classical_waterfill(sigma2, total_power).powers)
    if sigma2.size == 1:
        rate = finite_n_rate(n, pe, sigma2, start, order)
        return PowerAllocation((float(total_power),), float(total_power), rate, iterations=0)

    best = {"powers": start, "rate": finite_n_rate(n, pe, sigma2, start, order)}
    logger.info("[waterfill] n=%s K=%s classical rate=%.6f", n, sigma2.size, best["rate"])

    def objective(x: np.ndarray) -> float:
        powers = project_simplex(x, total_power)
        try:
            rate = finite_n_rate(n, pe, sigma2, powers, order)
        except FblError as exc:
            logger.debug("[waterfill] rate failed at %s: %s", powers, exc)
            return -best["rate"] + 1.0
        if rate > best["rate"]:
            best["powers"], best["rate"] = powers, rate
        return -rate

    result = optimize.minimize(
        objective,
        start,
        method="SLSQP",
        bounds=[(0.0, total_power)] * sigma2.size,
        constraints=[{"type": "eq", "fun": lambda x: float(np.sum(x)) - total_power}],
        options={"maxiter": max_iter, "ftol": 1e-12, "eps": 1e-7 * total_power},
    )
    if not result.success:
        logger.warning("[waterfill] optimizer stopped: %s; returning best iterate", result.message)
    powers = best["powers"]
    if abs(float(np.sum(powers)) - total_power) > _SUM_TOL * max(1.0, total_power):
        powers = project_simplex(powers, total_power)
    logger.info("[waterfill] finite-n rate=%.6f after %s iterations", best["rate"], result.nit)
    return PowerAllocation(
        powers=tuple(float(p) for p in powers),
        total=float(total_power),
        achieved_rate=float(best["rate"]),
        converged=bool(result.success),
        iterations=int(result.nit),
    )


def attenuation_noise(
    carriers: int,
    n0_half: float,
    base_db: float = 95.0,
    ripple_db: float = 10.0,
    cycles: float = 2.0,
) -> np.ndarray:
    """Equivalent noise variances of a frequency-selective multicarrier link.

    Each complex carrier has attenuation base + ripple cos(2 pi cycles c / C) dB
    and contributes two real sub-channels.
    """
    if carriers < 1:
        raise DomainError("at least one carrier is required")
    c = np.arange(carriers)
    att_db = base_db + ripple_db * np.cos(2.0 * math.pi * cycles * c / carriers)
    per_carrier = n0_half * 10.0 ** (att_db / 10.0)
    return np.repeat(per_carrier, 2)


@dataclass(frozen=True)
class WaterfillConfig:
    noise: Tuple[float, ...]
    total_power: float
    blocklengths: Tuple[int, ...]
    pe: float = 1e-3
    order: int = 2


def read_noise_csv(path: Path) -> Tuple[float, ...]:
    """Noise variances from a CSV of (index, sigma2) rows; a header row is allowed."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for record in csv.reader(fh):
            if not record or record[0].strip().startswith("#"):
                continue
            try:
                rows.append((int(record[0]), float(record[1])))
            except ValueError:
                if rows:
                    raise DomainError(f"bad noise row in {path}: {record}") from None
    if not rows:
        raise DomainError(f"no noise values in {path}")
    return tuple(sigma2 for _, sigma2 in sorted(rows))


def waterfill_config_from_dict(
    data: Mapping[str, Any], base_dir: Optional[Path] = None
) -> WaterfillConfig:
    if data.get("noise_file"):
        noise_path = Path(data["noise_file"])
        if base_dir is not None and not noise_path.is_absolute():
            noise_path = base_dir / noise_path
        noise = read_noise_csv(noise_path)
    elif data.get("noise"):
        noise = tuple(float(x) for x in data["noise"])
    elif data.get("profile"):
        profile = dict(data["profile"])
        noise = tuple(
            float(x)
            for x in attenuation_noise(
                int(profile.pop("carriers")), float(profile.pop("n0_half")), **profile
            )
        )
    else:
        raise DomainError("waterfill config needs noise_file, noise or profile")
    if "total_power" not in data:
        raise DomainError("waterfill config needs total_power")
    blocklengths = data.get("n") or [len(noise)]
    if not isinstance(blocklengths, (list, tuple)):
        blocklengths = [blocklengths]
    return WaterfillConfig(
        noise=noise,
        total_power=float(data["total_power"]),
        blocklengths=tuple(int(n) for n in blocklengths),
        pe=float(data.get("pe", 1e-3)),
        order=int(data.get("order", 2)),
    )


def load_waterfill_config(path: Path) -> WaterfillConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    config = waterfill_config_from_dict(data, base_dir=Path(path).parent)
    logger.info(
        "Loaded waterfill config from %s (K=%s total=%s n=%s)",
        path,
        len(config.noise),
        config.total_power,
        list(config.blocklengths),
    )
    return config


def run_waterfill(config: WaterfillConfig) -> List[Dict[str, Any]]:
    """Classical and finite-n allocations for every requested blocklength."""
    classical = classical_waterfill(config.noise, config.total_power)
    rows = []
    for n in config.blocklengths:
        finite = waterfill_finite_n(n, config.pe, config.noise, config.total_power, config.order)
        rows.append(
            {
                "n": n,
                "pe": config.pe,
                "order": config.order,
                "classical": classical.to_dict(),
                "classical_finite_n_rate": finite_n_rate(
                    n, config.pe, config.noise, classical.powers, config.order
                ),
                "finite_n": finite.to_dict(),
            }
        )
    return rows
