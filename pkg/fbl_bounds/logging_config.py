from __future__ import annotations

import logging
import os
from typing import Optional

import numpy as np

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"

_numpy_logger = logging.getLogger("fbl_bounds.numpy")


def _log_float_error(kind: str, flag: int) -> None:
    _numpy_logger.debug("[fp] %s (flag=%s)", kind, flag)


def resolve_level(level: Optional[str] = None) -> int:
    """Level from the argument, else FBL_LOG_LEVEL / LOG_LEVEL, else INFO."""
    resolved = level or os.environ.get("FBL_LOG_LEVEL") or os.environ.get("LOG_LEVEL", "INFO")
    return getattr(logging, resolved.upper(), logging.INFO)


def configure_logging(level: Optional[str] = None, force: bool = False) -> None:
    """Configure root logging with a standard format.

    Floating-point warnings from the tail evaluations (underflow in log-sum-exp,
    overflow in discarded branches) go to the ``fbl_bounds.numpy`` logger at
    DEBUG instead of stderr.
    """
    logging.basicConfig(level=resolve_level(level), format=LOG_FORMAT, force=force)
    logging.captureWarnings(True)
    np.seterrcall(_log_float_error)
    np.seterr(over="call", under="ignore", divide="call", invalid="call")


def ensure_logging_configured(level: Optional[str] = None) -> None:
    """Configure logging only if no handlers are present."""
    if logging.getLogger().handlers:
        return
    configure_logging(level=level, force=False)
