from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Callable, Mapping, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_QUADRATURE_ORDER = 200
DEFAULT_AGREEMENT_TOL = 0.05
DEFAULT_MC_SAMPLES = 1_000_000
DEFAULT_SWEEP_THREADS = 4
DEFAULT_METHOD = "asym2"


@dataclass(frozen=True)
class NumericsConfig:
    # Gauss-Hermite nodes used for the BI-AWGN transform.
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER
    # Relative log gap under which order-1/order-2 values are accepted
    # when no certificate is available.
    agreement_tol: float = DEFAULT_AGREEMENT_TOL
    mc_samples: int = DEFAULT_MC_SAMPLES
    sweep_threads: int = DEFAULT_SWEEP_THREADS
    default_method: str = DEFAULT_METHOD


def _env_value(
    env: Mapping[str, str],
    name: str,
    default: T,
    parse: Callable[[str], T],
    check: Callable[[T], bool],
) -> T:
    raw = (env.get(name) or "").strip()
    if not raw:
        return default
    try:
        value = parse(raw)
        if not check(value):
            raise ValueError(raw)
        return value
    except Exception:
        logger.warning("Invalid %s=%r; defaulting to %s", name, raw, default)
        return default


def _env_int(env: Mapping[str, str], name: str, default: int) -> int:
    return _env_value(env, name, default, int, lambda v: v > 0)


def _env_float(env: Mapping[str, str], name: str, default: float) -> float:
    return _env_value(env, name, default, float, lambda v: v > 0)


def load_numerics_config(environ: Mapping[str, str] | None = None) -> NumericsConfig:
    env = environ if environ is not None else os.environ
    method = (env.get("FBL_DEFAULT_METHOD") or DEFAULT_METHOD).strip().lower()
    return NumericsConfig(
        quadrature_order=max(
            64, _env_int(env, "FBL_QUADRATURE_ORDER", DEFAULT_QUADRATURE_ORDER)
        ),
        agreement_tol=_env_float(env, "FBL_AGREEMENT_TOL", DEFAULT_AGREEMENT_TOL),
        mc_samples=_env_int(env, "FBL_MC_SAMPLES", DEFAULT_MC_SAMPLES),
        sweep_threads=_env_int(env, "FBL_SWEEP_THREADS", DEFAULT_SWEEP_THREADS),
        default_method=method,
    )
