from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .sweep_config import SweepConfig


@dataclass
class SweepState:
    config: SweepConfig
    # grid indices still to evaluate, in order
    pending: List[int] = field(default_factory=list)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    # one entry per failed (index, kind) evaluation; the row is still written
    errors: List[Dict[str, Any]] = field(default_factory=list)
    batches: int = 0
    written: Optional[Path] = None
    # rendered table, kept when no output path is configured
    table: Optional[str] = None
