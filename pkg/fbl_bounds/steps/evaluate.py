from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Tuple

from pydantic_graph import BaseNode, End, GraphRunContext

from fbl_bounds.bounds_api import compute_bound
from fbl_bounds.channels import make_spec
from fbl_bounds.errors import FblError
from fbl_bounds.query import BoundKind, BoundQuery
from fbl_bounds.sweep_config import SweepConfig

logger = logging.getLogger(__name__)


def evaluate_point(config: SweepConfig, index: int, kind: BoundKind) -> Dict[str, Any]:
    point = config.point(index)
    row: Dict[str, Any] = {
        "index": index,
        config.axis: config.grid[index],
        "kind": kind.value,
        "n": point["n"],
        "rate": point["rate"],
        "pe": point["pe"],
        "value": None,
        "lower": None,
        "upper": None,
        "certified": None,
        "method": config.method.value,
        "error": None,
    }
    started = time.perf_counter()
    try:
        query = BoundQuery(
            channel=make_spec(config.channel, **point["params"]),
            n=point["n"],
            rate=point["rate"],
            pe=point["pe"],
            kind=kind,
            method=config.method,
            samples=config.samples,
            seed=config.seed,
        )
        result = compute_bound(query)
    except (FblError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    else:
        row["value"] = result.value
        row["method"] = result.method
        row["certified"] = result.certified
        if result.bracket is not None:
            row["lower"], row["upper"] = result.bracket
    if config.timing:
        row["wall_ms"] = round(1000.0 * (time.perf_counter() - started), 3)
    return row


@dataclass
class EvaluatePoints(BaseNode):
    indices: Tuple[int, ...]

    async def run(self, ctx: GraphRunContext) -> BaseNode | End:
        config = ctx.state.config
        jobs = [(i, kind) for i in self.indices for kind in config.kinds]
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(lambda job: evaluate_point(config, *job), jobs))
        for row in rows:
            if row["error"]:
                logger.warning(
                    "[evaluate] index=%s kind=%s failed: %s",
                    row["index"],
                    row["kind"],
                    row["error"],
                )
                ctx.state.errors.append(
                    {"index": row["index"], "kind": row["kind"], "error": row["error"]}
                )
        ctx.state.rows.extend(rows)
        ctx.state.batches += 1
        logger.info(
            "[evaluate] batch=%s points=%s remaining=%s",
            ctx.state.batches,
            len(self.indices),
            len(ctx.state.pending),
        )
        from .next_point import NextPoint

        return NextPoint()
